#include "output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace riddled::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

Csv::Csv(const std::vector<std::string>& header) {
  for (const auto& h : header) cell(h);
  end_row();
}

void Csv::sep() {
  if (row_open_) text_ += ',';
  row_open_ = true;
}

Csv& Csv::cell(double v) {
  sep();
  text_ += format_double(v);
  return *this;
}

Csv& Csv::cell(long long v) {
  sep();
  text_ += std::to_string(v);
  return *this;
}

Csv& Csv::cell(const std::string& v) {
  sep();
  text_ += v;
  return *this;
}

void Csv::end_row() {
  text_ += '\n';
  row_open_ = false;
}

std::string pgm_bytes(const GridResult& grid) {
  std::string out = "P5 " + std::to_string(grid.spec.nx) + " " + std::to_string(grid.spec.ny) + " 255\n";
  out.reserve(out.size() + grid.labels.size());
  for (auto l : grid.labels) {
    switch (l) {
      case BasinLabel::CPlus: out.push_back(static_cast<char>(0)); break;
      case BasinLabel::CMinus: out.push_back(static_cast<char>(255)); break;
      case BasinLabel::Unresolved: out.push_back(static_cast<char>(128)); break;
    }
  }
  return out;
}

std::string label_matrix_csv(const GridResult& grid) {
  std::vector<std::string> header{"y"};
  for (std::size_t i = 0; i < grid.spec.nx; ++i) header.push_back("x=" + format_double(grid.spec.x_at(i)));
  Csv csv(header);
  for (std::size_t j = 0; j < grid.spec.ny; ++j) {
    csv.cell(grid.spec.y_at(j));
    for (std::size_t i = 0; i < grid.spec.nx; ++i) csv.cell(to_int(grid.at(i, j)));
    csv.end_row();
  }
  return csv.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

void OutputSet::add(const std::string& name, std::string bytes) { files_.emplace_back(name, std::move(bytes)); }

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void OutputSet::add_json(const std::string& name, const nlohmann::json& j) { add(name, dump_json(j)); }

void OutputSet::write(const nlohmann::json& manifest_body) const {
  std::filesystem::create_directories(dir_);
  nlohmann::json manifest = manifest_body;
  nlohmann::json listing = nlohmann::json::array();
  for (const auto& [name, bytes] : files_) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    listing.push_back({{"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  }
  manifest["outputs"] = listing;
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << dump_json(manifest);
  if (!out) throw std::runtime_error("cannot write manifest");
}

}  // namespace riddled::cli
