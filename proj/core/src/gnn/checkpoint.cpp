#include "disttack/gnn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

namespace disttack {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
  return prefix.string() + suffix;
}

void put_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

double get_le(const unsigned char* buf) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const ParamSet& params, const std::filesystem::path& prefix) {
  const auto bin_path = with_suffix(prefix, ".bin");
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw IoError("cannot write " + bin_path.string());

  nlohmann::json meta;
  meta["format"] = "disttack-checkpoint-v1";
  meta["model"] = std::string(to_string(params.spec.kind));
  meta["hidden"] = params.spec.hidden;
  meta["sgc_steps"] = params.spec.sgc_steps;
  meta["learning_rate"] = params.learning_rate;
  meta["tensors"] = nlohmann::json::array();
  const auto names = params.names();
  std::size_t offset = 0;
  for (std::size_t t = 0; t < params.weights.size(); ++t) {
    const Matrix& w = params.weights[t];
    meta["tensors"].push_back({{"name", names[t]}, {"shape", {w.rows(), w.cols()}}, {"offset", offset}});
    for (Eigen::Index k = 0; k < w.size(); ++k) put_le(bin, w.data()[k]);
    offset += static_cast<std::size_t>(w.size());
  }
  if (!bin) throw IoError("write failed: " + bin_path.string());

  const auto json_path = with_suffix(prefix, ".json");
  std::ofstream js(json_path);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << meta.dump(2) << '\n';
}

ParamSet load_checkpoint(const std::filesystem::path& prefix) {
  const auto json_path = with_suffix(prefix, ".json");
  std::ifstream js(json_path);
  if (!js) throw IoError("cannot open " + json_path.string());
  const auto bin_path = with_suffix(prefix, ".bin");
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw IoError("cannot open " + bin_path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());

  try {
    nlohmann::json meta;
    js >> meta;
    ParamSet p;
    p.spec.kind = parse_model_kind(meta.at("model").get<std::string>());
    p.spec.hidden = meta.at("hidden").get<std::size_t>();
    p.spec.sgc_steps = meta.at("sgc_steps").get<int>();
    p.learning_rate = meta.at("learning_rate").get<double>();
    for (const auto& t : meta.at("tensors")) {
      const auto rows = t.at("shape").at(0).get<Eigen::Index>();
      const auto cols = t.at("shape").at(1).get<Eigen::Index>();
      const auto offset = t.at("offset").get<std::size_t>();
      if ((offset + static_cast<std::size_t>(rows * cols)) * 8 > bytes.size()) {
        throw IoError(bin_path.string() + ": truncated tensor " + t.at("name").get<std::string>());
      }
      Matrix w(rows, cols);
      for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = get_le(bytes.data() + (offset + static_cast<std::size_t>(k)) * 8);
      p.weights.push_back(std::move(w));
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(json_path.string() + ": " + e.what());
  }
}

}  // namespace disttack
