#include "wmsense/harness/iq_file.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include <nlohmann/json.hpp>

#include "wmsense/error.hpp"

namespace wmsense::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint32_t load_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_le32(unsigned char* p, std::uint32_t v) {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

IqMetadata read_sidecar(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "missing sidecar '" + path.string() + "'");
  try {
    const json doc = json::parse(in);
    IqMetadata m;
    m.sample_rate_hz = doc.at("sample_rate_hz").get<double>();
    m.center_freq_hz = doc.value("center_freq_hz", 0.0);
    m.format = doc.at("format").get<std::string>();
    if (m.format != "cf32le") fail(Errc::io, "unsupported sample format '" + m.format + "'");
    if (!(std::isfinite(m.sample_rate_hz) && m.sample_rate_hz > 0.0)) {
      fail(Errc::io, "sidecar sample_rate_hz must be positive");
    }
    return m;
  } catch (const json::exception& e) {
    fail(Errc::io, "malformed sidecar '" + path.string() + "': " + e.what());
  }
}

}  // namespace

fs::path sidecar_path(const fs::path& iq_path) {
  fs::path p = iq_path;
  p.replace_extension(".meta.json");
  return p;
}

IqCapture read_iq_file(const fs::path& iq_path) {
  const IqMetadata meta = read_sidecar(sidecar_path(iq_path));
  std::ifstream in(iq_path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open IQ file '" + iq_path.string() + "'");
  const std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.empty() || raw.size() % 8 != 0) {
    fail(Errc::io, "IQ file '" + iq_path.string() + "' is empty or not a whole number of cf32 samples");
  }
  std::vector<cplx> samples(raw.size() / 8);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const float re = std::bit_cast<float>(load_le32(&raw[8 * i]));
    const float im = std::bit_cast<float>(load_le32(&raw[8 * i + 4]));
    if (!std::isfinite(re) || !std::isfinite(im)) fail(Errc::io, "IQ file contains non-finite samples");
    samples[i] = cplx(re, im);
  }
  return {BasebandBlock(std::move(samples), meta.sample_rate_hz), meta};
}

void write_iq_file(const fs::path& iq_path, const BasebandBlock& samples, double center_freq_hz) {
  std::vector<unsigned char> raw(samples.size() * 8);
  std::size_t i = 0;
  for (const cplx& s : samples.samples()) {
    store_le32(&raw[8 * i], std::bit_cast<std::uint32_t>(static_cast<float>(s.real())));
    store_le32(&raw[8 * i + 4], std::bit_cast<std::uint32_t>(static_cast<float>(s.imag())));
    ++i;
  }
  {
    std::ofstream out(iq_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write IQ file '" + iq_path.string() + "'");
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(Errc::io, "failed writing IQ file '" + iq_path.string() + "'");
  }
  const json meta{{"sample_rate_hz", samples.sample_rate()}, {"center_freq_hz", center_freq_hz}, {"format", "cf32le"}};
  std::ofstream side(sidecar_path(iq_path), std::ios::trunc);
  if (!side) fail(Errc::io, "cannot write sidecar '" + sidecar_path(iq_path).string() + "'");
  side << meta.dump(2) << '\n';
  if (!side) fail(Errc::io, "failed writing sidecar");
}

}  // namespace wmsense::harness
