#include "numforge/nmlf.hpp"

#include "numforge/error.hpp"

#include <bit>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace numforge {

namespace {

template <class UInt>
void put_le(std::string& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class UInt>
  UInt get(const char* what) {
    need(sizeof(UInt), what);
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
      v |= static_cast<UInt>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(UInt);
    return v;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw FormatError(std::string("NMLF truncated while reading ") + what + " at byte " +
                        std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const TensorEntry* TensorFile::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::string serialize_nmlf(const TensorFile& file) {
  std::string out = "NMLF";
  put_le<std::uint32_t>(out, kNmlfVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(file.entries.size()));
  for (const auto& e : file.entries) {
    if (e.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw FormatError("tensor name too long: " + e.name.substr(0, 64) + "...");
    }
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.name.size()));
    out += e.name;
    out.push_back(static_cast<char>(e.dtype));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.data.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.data.cols()));
    for (Eigen::Index r = 0; r < e.data.rows(); ++r) {
      for (Eigen::Index c = 0; c < e.data.cols(); ++c) {
        const double v = e.data(r, c);
        if (e.dtype == DType::kF32) {
          put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        } else {
          put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
        }
      }
    }
  }
  return out;
}

TensorFile parse_nmlf(std::string_view bytes) {
  Reader rd(bytes);
  if (rd.take(4, "magic") != "NMLF") throw FormatError("not an NMLF file (bad magic)");
  const auto version = rd.get<std::uint32_t>("version");
  if (version != kNmlfVersion) {
    throw FormatError("unsupported NMLF version " + std::to_string(version));
  }
  const auto count = rd.get<std::uint32_t>("entry count");
  TensorFile file;
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    TensorEntry e;
    const auto name_len = rd.get<std::uint16_t>("name length");
    e.name = std::string(rd.take(name_len, "name"));
    if (!seen.insert(e.name).second) throw FormatError("duplicate NMLF entry '" + e.name + "'");
    const auto dtype = rd.get<std::uint8_t>("dtype");
    if (dtype > 1) throw FormatError("entry '" + e.name + "': unknown dtype " + std::to_string(dtype));
    e.dtype = static_cast<DType>(dtype);
    const auto rows = rd.get<std::uint32_t>("rows");
    const auto cols = rd.get<std::uint32_t>("cols");
    const std::size_t width = e.dtype == DType::kF32 ? 4 : 8;
    const std::uint64_t payload = static_cast<std::uint64_t>(rows) * cols * width;
    if (payload > rd.remaining()) {
      throw FormatError("entry '" + e.name + "': payload of " + std::to_string(payload) +
                        " bytes exceeds file length");
    }
    e.data.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        e.data(r, c) = e.dtype == DType::kF32
                           ? static_cast<double>(std::bit_cast<float>(rd.get<std::uint32_t>("payload")))
                           : std::bit_cast<double>(rd.get<std::uint64_t>("payload"));
      }
    }
    file.entries.push_back(std::move(e));
  }
  if (rd.remaining() != 0) {
    throw FormatError("NMLF has " + std::to_string(rd.remaining()) + " trailing bytes");
  }
  return file;
}

TensorFile read_nmlf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open tensor file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_nmlf(ss.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_nmlf(const std::filesystem::path& path, const TensorFile& file) {
  const std::string bytes = serialize_nmlf(file);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write tensor file: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace numforge
