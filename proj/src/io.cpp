#include "specklesim/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace specklesim {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

// All payloads are little-endian on disk regardless of host order.
static_assert(std::endian::native == std::endian::little,
              "image I/O assumes a little-endian host");

std::string sidecar_path(const std::filesystem::path& base) {
  std::filesystem::path p = base;
  p += ".txt";
  return p.string();
}

std::string payload_path(const std::filesystem::path& base) {
  std::filesystem::path p = base;
  p += ".f32";
  return p.string();
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<std::uint64_t>(p[i]);
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  require(in.good(), "cannot open file for hashing: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

void write_image_f32(const std::filesystem::path& base, const Image& img,
                     const std::string& role) {
  img.grid.validate();
  require(img.v.size() == img.grid.size(), "image buffer size does not match grid");
  std::vector<float> buf(img.v.size());
  for (std::size_t i = 0; i < img.v.size(); ++i) buf[i] = static_cast<float>(img.v[i]);
  {
    std::ofstream out(payload_path(base), std::ios::binary | std::ios::trunc);
    require(out.good(), "cannot open for writing: " + payload_path(base));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    require(out.good(), "write failed: " + payload_path(base));
  }
  char pitch_str[64];
  std::snprintf(pitch_str, sizeof(pitch_str), "%.17g", img.grid.pitch);
  std::ostringstream side;
  side << "n1=" << img.grid.n1 << "\n"
       << "n2=" << img.grid.n2 << "\n"
       << "pitch=" << pitch_str << "\n"
       << "dtype=float32le\n"
       << "role=" << role << "\n";
  write_text_file(sidecar_path(base), side.str());
}

Image read_image_f32(const std::filesystem::path& base) {
  // Parse the sidecar first to learn dimensions.
  const std::string side = read_text_file(sidecar_path(base));
  Grid grid{0, 0, 0.0};
  std::string dtype;
  {
    std::istringstream in(side);
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (key == "n1") grid.n1 = std::stoi(value);
      else if (key == "n2") grid.n2 = std::stoi(value);
      else if (key == "pitch") grid.pitch = std::stod(value);
      else if (key == "dtype") dtype = value;
    }
  }
  require(dtype == "float32le", "unsupported dtype in " + sidecar_path(base));
  grid.validate();
  std::ifstream in(payload_path(base), std::ios::binary);
  require(in.good(), "cannot open for reading: " + payload_path(base));
  std::vector<float> buf(static_cast<std::size_t>(grid.size()));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  require(in.gcount() ==
              static_cast<std::streamsize>(buf.size() * sizeof(float)),
          "payload too short: " + payload_path(base));
  Image img(grid);
  for (std::size_t i = 0; i < buf.size(); ++i) img.v[i] = static_cast<double>(buf[i]);
  return img;
}

void write_pgm16(const std::filesystem::path& file, const Image& img) {
  img.grid.validate();
  double mx = 0.0;
  for (double x : img.v) mx = std::max(mx, x);
  const double scale = mx > 0.0 ? 65535.0 / mx : 0.0;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot open for writing: " + file.string());
  out << "P5\n" << img.grid.n2 << " " << img.grid.n1 << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.grid.n2) * 2);
  for (int i = 0; i < img.grid.n1; ++i) {
    for (int j = 0; j < img.grid.n2; ++j) {
      const double x = std::max(0.0, img.at(i, j)) * scale;
      const auto u = static_cast<unsigned>(std::min(65535.0, x) + 0.5);
      row[2 * static_cast<std::size_t>(j)] = static_cast<unsigned char>(u >> 8);
      row[2 * static_cast<std::size_t>(j) + 1] = static_cast<unsigned char>(u & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  require(out.good(), "write failed: " + file.string());
}

void write_stack(const std::filesystem::path& dir, const ImageStack& stack,
                 const std::string& prefix) {
  stack.grid.validate();
  require(stack.m >= 1, "stack must contain at least one frame");
  for (int f = 0; f < stack.m; ++f) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%04d", f);
    write_image_f32(dir / (prefix + suffix), stack.frame_image(f), "frame");
  }
  char pitch_str[64];
  std::snprintf(pitch_str, sizeof(pitch_str), "%.17g", stack.grid.pitch);
  std::ostringstream side;
  side << "m=" << stack.m << "\n"
       << "n1=" << stack.grid.n1 << "\n"
       << "n2=" << stack.grid.n2 << "\n"
       << "pitch=" << pitch_str << "\n"
       << "prefix=" << prefix << "\n";
  write_text_file(dir / (prefix + "_stack.txt"), side.str());
}

ImageStack read_stack(const std::filesystem::path& dir, const std::string& prefix) {
  const std::string side = read_text_file((dir / (prefix + "_stack.txt")).string());
  int m = 0;
  {
    std::istringstream in(side);
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      if (line.substr(0, eq) == "m") m = std::stoi(line.substr(eq + 1));
    }
  }
  require(m >= 1, "stack manifest missing frame count");
  ImageStack stack;
  for (int f = 0; f < m; ++f) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "_%04d", f);
    Image frame = read_image_f32(dir / (prefix + suffix));
    if (f == 0) {
      stack = ImageStack(frame.grid, m);
    } else {
      require(frame.grid == stack.grid, "stack frames disagree on grid");
    }
    std::memcpy(stack.frame(f), frame.v.data(), frame.v.size() * sizeof(double));
  }
  return stack;
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot open for writing: " + file.string());
  out << text;
  require(out.good(), "write failed: " + file.string());
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  require(in.good(), "cannot open for reading: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace specklesim
