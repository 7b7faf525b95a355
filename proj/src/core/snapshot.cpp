// SPDX-License-Identifier: Apache-2.0
#include "snapshot.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "functional.hpp"

namespace ltopt {

namespace fs = std::filesystem;

std::string exact(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  require(ec == std::errc() && ptr == end, ErrorCode::io_error, "snapshot: bad number for " + what + ": '" + text + "'");
  return value;
}

}  // namespace

void write_snapshot(std::ostream& os, const PotentialField& V) {
  require(V.values.size() == V.grid.size(), ErrorCode::mismatched_grid, "potential does not match grid size");
  double norm = 0.0;
  try {
    norm = norm_integral(V, params_of(V));
  } catch (const Error&) {
    norm = 0.0;
  }
  os << "# ltopt snapshot\n";
  os << "# d=" << V.dim << " gamma=" << exact(V.gamma) << " N=" << V.grid.elements() << " L=" << exact(V.grid.L)
     << " grading=" << exact(V.grid.grading) << " norm=" << exact(norm) << " kind=" << domain_kind_name(V.grid.kind)
     << "\n";
  os << "r,V\n";
  for (std::size_t k = 0; k < V.values.size(); ++k) os << exact(V.grid.nodes[k]) << ',' << exact(V.values[k]) << '\n';
  require(static_cast<bool>(os), ErrorCode::io_error, "snapshot: write failed");
}

PotentialField read_snapshot(std::istream& is) {
  std::string line;
  std::map<std::string, std::string> header;
  bool columns = false;
  while (!columns && std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) {
      std::istringstream fields(line.substr(1));
      std::string field;
      while (fields >> field) {
        const auto eq = field.find('=');
        if (eq != std::string::npos) header[field.substr(0, eq)] = field.substr(eq + 1);
      }
    } else if (line == "r,V") {
      columns = true;
    }
  }
  require(columns, ErrorCode::io_error, "snapshot: missing 'r,V' column line");
  for (const char* key : {"d", "gamma", "N", "L", "grading", "kind"})
    require(header.count(key) == 1, ErrorCode::io_error, std::string("snapshot: header lacks ") + key);

  PotentialField V;
  V.dim = static_cast<int>(parse_double(header["d"], "d"));
  V.gamma = parse_double(header["gamma"], "gamma");
  V.grid.L = parse_double(header["L"], "L");
  V.grid.grading = parse_double(header["grading"], "grading");
  const std::string& kind = header["kind"];
  require(kind == "radial" || kind == "line", ErrorCode::io_error, "snapshot: unknown kind '" + kind + "'");
  V.grid.kind = kind == "radial" ? DomainKind::radial_halfline : DomainKind::full_line;

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorCode::io_error, "snapshot: malformed row '" + line + "'");
    V.grid.nodes.push_back(parse_double(line.substr(0, comma), "r"));
    V.values.push_back(parse_double(line.substr(comma + 1), "V"));
  }
  const auto elements = static_cast<std::size_t>(parse_double(header["N"], "N"));
  require(V.grid.elements() == elements, ErrorCode::io_error, "snapshot: row count does not match N");
  validate_grid(V.grid);
  return V;
}

void save_snapshot(const fs::path& path, const PotentialField& V) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  write_snapshot(os, V);
}

PotentialField load_snapshot(const fs::path& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::io_error, "cannot open snapshot " + path.string());
  return read_snapshot(is);
}

BranchStore::BranchStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  require(!ec, ErrorCode::io_error, "cannot create " + root_.string() + ": " + ec.message());
}

fs::path BranchStore::branch_dir(const std::string& branch_id) const { return root_ / branch_id; }

SnapshotSink BranchStore::sink(const std::string& branch_id) {
  const fs::path dir = branch_dir(branch_id);
  {
    std::lock_guard lock(mutex_);
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());
  }
  return [dir](const Branch&, const BranchPoint& point) {
    char name[64];
    std::snprintf(name, sizeof name, "point_%.8f.csv", point.gamma);
    save_snapshot(dir / name, point.potential);
    return std::string(name);
  };
}

void BranchStore::write_manifest(const std::string& branch_id, const Branch& branch) {
  nlohmann::json m;
  m["label"] = branch.label;
  m["d"] = branch.dim;
  m["direction"] = direction_name(branch.direction);
  for (const auto& p : branch.points) {
    m["gamma"].push_back(p.gamma);
    m["ratio"].push_back(p.ratio);
    m["bound_states"].push_back(p.bound_states);
    m["snapshot"].push_back(p.snapshot_ref);
  }
  m["events"] = nlohmann::json::array();
  for (const auto& e : branch.events)
    m["events"].push_back({{"gamma_before", e.gamma_before},
                           {"gamma_after", e.gamma_after},
                           {"count_before", e.count_before},
                           {"count_after", e.count_after}});
  m["termination"] = branch.termination;
  const fs::path path = branch_dir(branch_id) / "manifest.json";
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::io_error, "cannot write " + path.string());
  os << m.dump(2) << '\n';
}

}  // namespace ltopt
