#include "chartlens/fs_util.hpp"

#include <fstream>
#include <sstream>

#include "chartlens/error.hpp"

namespace chartlens {

namespace {

void write_bytes_atomic(const std::filesystem::path& path, const char* data, std::size_t size) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(data, static_cast<std::streamsize>(size));
    out.flush();
    if (!out) throw InputError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  write_bytes_atomic(path, contents.data(), contents.size());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> contents) {
  write_bytes_atomic(path, reinterpret_cast<const char*>(contents.data()), contents.size());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace chartlens
