#include "nlchb/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iterator>
#include <sstream>

namespace nlchb {

namespace {

constexpr const char* kMagic = "NLCHB1\n";

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int k = 0; k < 8; ++k) r |= ((v >> (8 * k)) & 0xffu) << (8 * (7 - k));
  return r;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(std::string("snapshot header: bad ") + what + " '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const char* what) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(std::string("snapshot header: bad ") + what + " '" + s + "'");
  return v;
}

// Header parsing works on the whole file held in memory.
class Cursor {
public:
  explicit Cursor(const std::string& data) : data_(data) {}
  bool line(std::string& out) {
    const std::size_t nl = data_.find('\n', pos_);
    if (nl == std::string::npos) return false;
    out = data_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return true;
  }
  bool bytes(std::size_t n, std::string& out) {
    if (data_.size() - pos_ < n) return false;
    out = data_.substr(pos_, n);
    pos_ += n;
    return true;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  const char* here() const { return data_.data() + pos_; }

private:
  const std::string& data_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_ws(const std::string& s, std::size_t max_parts) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size() && out.size() + 1 < max_parts) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t j = s.find(' ', i);
    if (j == std::string::npos) break;
    out.push_back(s.substr(i, j - i));
    i = j + 1;
  }
  if (i <= s.size()) out.push_back(s.substr(i));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

const std::string* FieldFile::find_meta(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return &v;
  return nullptr;
}

const std::string* FieldFile::find_blob(const std::string& key) const {
  for (const auto& [k, v] : blobs)
    if (k == key) return &v;
  return nullptr;
}

const std::vector<double>* FieldFile::find_field(const std::string& name) const {
  for (const auto& [k, v] : fields)
    if (k == name) return &v;
  return nullptr;
}

void write_field_file(const FieldFile& f, const std::string& path) {
  std::ostringstream head;
  head << kMagic << "grid " << f.nx << " " << f.ny << " " << format_double(f.lx) << " " << format_double(f.ly) << "\n";
  for (const auto& [k, v] : f.meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos)
      throw Error("snapshot: metadata keys may not contain spaces and values no newlines");
    head << "meta " << k << " " << v << "\n";
  }
  for (const auto& [k, v] : f.blobs) head << "blob " << k << " " << v.size() << "\n" << v << "\n";
  for (const auto& [k, v] : f.fields) head << "field " << k << " " << v.size() << "\n";
  head << "end\n";

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    const std::string h = head.str();
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    for (const auto& [k, v] : f.fields)
      for (double d : v) {
        const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(d));
        out.write(reinterpret_cast<const char*>(&bits), 8);
      }
    if (!out) throw Error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.compare(0, 7, kMagic) != 0) throw Error("snapshot header: '" + path + "' does not start with NLCHB1");
  Cursor c(data);
  std::string line;
  c.line(line);

  FieldFile f;
  bool have_grid = false, ended = false;
  std::vector<std::pair<std::string, std::size_t>> decl;
  while (c.line(line)) {
    const std::vector<std::string> w = split_ws(line, 3);
    if (w[0] == "end") {
      ended = true;
      break;
    }
    if (w[0] == "grid") {
      const std::vector<std::string> g = split_ws(line, 5);
      if (g.size() != 5) throw Error("snapshot header: malformed grid line");
      f.nx = static_cast<int>(parse_long(g[1], "nx"));
      f.ny = static_cast<int>(parse_long(g[2], "ny"));
      f.lx = parse_double(g[3], "lx");
      f.ly = parse_double(g[4], "ly");
      have_grid = true;
    } else if (w[0] == "meta" && w.size() == 3) {
      f.meta.emplace_back(w[1], w[2]);
    } else if (w[0] == "meta" && w.size() == 2) {
      f.meta.emplace_back(w[1], "");
    } else if (w[0] == "blob" && w.size() == 3) {
      const long n = parse_long(w[2], "blob size");
      std::string bytes, nl;
      if (n < 0 || !c.bytes(static_cast<std::size_t>(n), bytes) || !c.bytes(1, nl) || nl != "\n")
        throw Error("snapshot header: truncated blob '" + w[1] + "'");
      f.blobs.emplace_back(w[1], std::move(bytes));
    } else if (w[0] == "field" && w.size() == 3) {
      const long n = parse_long(w[2], "field size");
      if (n < 0) throw Error("snapshot header: negative field size");
      decl.emplace_back(w[1], static_cast<std::size_t>(n));
    } else {
      throw Error("snapshot header: unrecognized line '" + line + "'");
    }
  }
  if (!ended) throw Error("snapshot header: truncated (no end marker) in '" + path + "'");
  if (!have_grid) throw Error("snapshot header: missing grid line");
  std::size_t total = 0;
  for (const auto& d : decl) total += d.second;
  if (c.remaining() != 8 * total) {
    std::ostringstream msg;
    msg << "snapshot: '" << path << "' holds " << c.remaining() << " data bytes, header declares " << 8 * total;
    throw Error(msg.str());
  }
  const char* p = c.here();
  for (const auto& [name, n] : decl) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k, p += 8) {
      std::uint64_t bits;
      std::copy(p, p + 8, reinterpret_cast<char*>(&bits));
      v[k] = std::bit_cast<double>(to_little(bits));
    }
    f.fields.emplace_back(name, std::move(v));
  }
  return f;
}

void write_snapshot(const SimState& s, const SnapshotMeta& meta, const std::string& path) {
  const Grid& g = s.grid();
  FieldFile f;
  f.nx = g.nx();
  f.ny = g.ny();
  f.lx = g.lx();
  f.ly = g.ly();
  f.meta = {{"t", format_double(s.t)},
            {"step", std::to_string(s.step)},
            {"mode", to_string(meta.mode)},
            {"epsilon", format_double(meta.epsilon)},
            {"gamma", format_double(meta.gamma)},
            {"dt", format_double(meta.dt)}};
  if (!meta.config.empty()) f.blobs.emplace_back("config", meta.config);
  auto vec = [](std::span<const double> v) { return std::vector<double>(v.begin(), v.end()); };
  f.fields = {{"phi", vec(s.phi.values())},
              {"theta", vec(s.theta.values())},
              {"u", vec(s.u.u_values())},
              {"v", vec(s.u.v_values())},
              {"mu", vec(s.mu.values())}};
  write_field_file(f, path);
}

Snapshot read_snapshot(const std::string& path) {
  const FieldFile f = read_field_file(path);
  auto meta = [&](const char* key) -> const std::string& {
    const std::string* v = f.find_meta(key);
    if (!v) throw Error(std::string("snapshot header: missing '") + key + "'");
    return *v;
  };
  if (f.nx < 1 || f.ny < 1) throw Error("snapshot header: bad grid dimensions");
  const Grid g = Grid::make(f.nx, f.ny, f.lx, f.ly);
  Snapshot snap{SimState(g), SnapshotMeta{}};
  SimState& s = snap.state;
  s.t = parse_double(meta("t"), "t");
  s.step = parse_long(meta("step"), "step");
  snap.meta.mode = parse_mode(meta("mode"));
  snap.meta.epsilon = parse_double(meta("epsilon"), "epsilon");
  snap.meta.gamma = parse_double(meta("gamma"), "gamma");
  snap.meta.dt = parse_double(meta("dt"), "dt");
  if (const std::string* c = f.find_blob("config")) snap.meta.config = *c;
  auto load = [&](const char* name, std::span<double> dst) {
    const std::vector<double>* v = f.find_field(name);
    if (!v) throw Error(std::string("snapshot: missing field '") + name + "'");
    if (v->size() != dst.size()) throw Error(std::string("snapshot: field '") + name + "' does not match the grid");
    std::copy(v->begin(), v->end(), dst.begin());
  };
  load("phi", s.phi.values());
  load("theta", s.theta.values());
  load("u", s.u.u_values());
  load("v", s.u.v_values());
  load("mu", s.mu.values());
  return snap;
}

CsvLedgerWriter::CsvLedgerWriter(const std::string& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  out_.open(path, std::ios::app);
  if (!out_) throw Error("cannot open '" + path + "' for writing");
  if (fresh) {
    const auto& cols = ledger_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out_ << (k ? "," : "") << cols[k];
    out_ << "\n";
    out_.flush();
  }
}

void CsvLedgerWriter::write(const LedgerRow& row) {
  const std::vector<double> v = ledger_values(row);
  for (std::size_t k = 0; k < v.size(); ++k) out_ << (k ? "," : "") << format_double(v[k]);
  out_ << "\n";
  out_.flush();
  if (!out_) throw Error("ledger: write failed");
}

void write_ppm(const ScalarField& f, double range, const std::string& path) {
  if (!(range > 0.0) || !std::isfinite(range)) range = 1.0;
  const Grid& g = f.grid();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "P6\n" << g.nx() << " " << g.ny() << "\n255\n";
  for (int j = g.ny() - 1; j >= 0; --j)
    for (int i = 0; i < g.nx(); ++i) {
      const double s = std::clamp(f(i, j) / range, -1.0, 1.0);
      const double w = 1.0 - std::abs(s);
      // negative -> blue (59, 76, 192), positive -> red (180, 4, 38), zero -> white
      const double r = s < 0 ? 59 : 180, gg = s < 0 ? 76 : 4, b = s < 0 ? 192 : 38;
      const unsigned char px[3] = {static_cast<unsigned char>(std::lround(w * 255 + (1 - w) * r)),
                                   static_cast<unsigned char>(std::lround(w * 255 + (1 - w) * gg)),
                                   static_cast<unsigned char>(std::lround(w * 255 + (1 - w) * b))};
      out.write(reinterpret_cast<const char*>(px), 3);
    }
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace nlchb
