#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "nlchb/energy.hpp"
#include "nlchb/state.hpp"

namespace nlchb {

/// Named arrays on a grid plus free-form metadata. On disk:
///
///   NLCHB1
///   grid <nx> <ny> <lx> <ly>
///   meta <key> <value>          (any number; value runs to end of line)
///   blob <key> <bytes>          (followed by exactly <bytes> raw bytes and a newline)
///   field <name> <count>        (in storage order)
///   end
///   <count doubles per field, 64-bit little-endian, in field order>
struct FieldFile {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, std::string>> blobs;
  std::vector<std::pair<std::string, std::vector<double>>> fields;

  const std::string* find_meta(const std::string& key) const;
  const std::string* find_blob(const std::string& key) const;
  const std::vector<double>* find_field(const std::string& name) const;
};

void write_field_file(const FieldFile& file, const std::string& path);
/// Reads everything before building the result; throws on any header or size mismatch.
FieldFile read_field_file(const std::string& path);

struct SnapshotMeta {
  Mode mode = Mode::kNonlocal;
  double epsilon = 0.0;
  double gamma = 0.0;
  double dt = 0.0;          ///< step size in use, so a restart continues identically
  std::string config;       ///< canonical run configuration text (may be empty)
};

struct Snapshot {
  SimState state;
  SnapshotMeta meta;
};

/// Fields phi, theta, u, v, mu; t and step are stored exactly.
void write_snapshot(const SimState& state, const SnapshotMeta& meta, const std::string& path);
Snapshot read_snapshot(const std::string& path);

/// Appends ledger rows as CSV (columns of ledger_columns()); the header is
/// written only when the file is new or empty.
class CsvLedgerWriter {
public:
  explicit CsvLedgerWriter(const std::string& path);
  void write(const LedgerRow& row);

private:
  std::ofstream out_;
};

/// Binary PPM with a blue-white-red map over [-range, range]; row 0 of the
/// image is the top of the domain.
void write_ppm(const ScalarField& field, double range, const std::string& path);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace nlchb
