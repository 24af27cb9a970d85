#include "nlwave/field_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nlwave/errors.hpp"

namespace nlwave {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_raw(std::ofstream& out, const std::vector<cplx>& data) {
  // std::complex<double> is laid out as (re, im) doubles; on this target
  // that is the documented little-endian float64 pair stream.
  out.write(reinterpret_cast<const char*>(data.data()),
            std::streamsize(data.size() * sizeof(cplx)));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("field io: cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("field io: cannot open for reading: " + path);
  return in;
}

}  // namespace

void write_field_binary(const std::string& path, const Field& f) {
  std::ofstream out = open_out(path);
  write_raw(out, f.data);
  if (!out) throw ConfigError("field io: short write: " + path);
}

Field read_field_binary(const std::string& path,
                        std::shared_ptr<const Grid> grid, int channels,
                        Space space) {
  Field f = zero_field(std::move(grid), channels, space);
  std::ifstream in = open_in(path);
  in.read(reinterpret_cast<char*>(f.data.data()),
          std::streamsize(f.data.size() * sizeof(cplx)));
  if (std::size_t(in.gcount()) != f.data.size() * sizeof(cplx))
    throw ConfigError("field io: file shorter than the field: " + path);
  return f;
}

void write_timeline_binary(const std::string& dir, const std::string& stem,
                           const SolutionTimeline& sol) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = (fs::path(dir) / stem).string();

  std::ofstream u_out = open_out(base + "_u.bin");
  std::ofstream ut_out = open_out(base + "_ut.bin");
  for (std::size_t k = 0; k < sol.samples(); ++k) {
    write_raw(u_out, sol.u[k].data);
    write_raw(ut_out, sol.ut[k].data);
  }
  if (!u_out || !ut_out)
    throw ConfigError("field io: short timeline write under " + dir);

  const Grid& g = *sol.u.front().grid;
  ordered_json meta;
  meta["format_version"] = 1;
  meta["grid"] = {{"dim", g.dim()},
                  {"points_per_axis", g.points_per_axis()},
                  {"length", g.length()}};
  meta["channels"] = sol.u.front().channels;
  meta["snapshots"] = sol.samples();
  meta["time_steps"] = sol.samples() - 1;
  meta["horizon"] = sol.times.back();
  meta["space"] = "physical";
  meta["times"] = sol.times;
  std::ofstream m(base + "_meta.json", std::ios::trunc);
  if (!m) throw ConfigError("field io: cannot write sidecar under " + dir);
  m << meta.dump(2) << "\n";
}

SolutionTimeline read_timeline_binary(const std::string& dir,
                                      const std::string& stem) {
  namespace fs = std::filesystem;
  const std::string base = (fs::path(dir) / stem).string();
  std::ifstream m(base + "_meta.json");
  if (!m) throw ConfigError("field io: missing sidecar under " + dir);
  ordered_json meta = ordered_json::parse(m);

  const int dim = meta.at("grid").at("dim").get<int>();
  const int points = meta.at("grid").at("points_per_axis").get<int>();
  const double length = meta.at("grid").at("length").get<double>();
  const int channels = meta.at("channels").get<int>();
  const auto snapshots = meta.at("snapshots").get<std::size_t>();

  auto grid = std::make_shared<Grid>(dim, points, length);
  SolutionTimeline sol;
  sol.times = meta.at("times").get<std::vector<double>>();
  if (sol.times.size() != snapshots)
    throw ConfigError("field io: sidecar times do not match snapshots");

  std::ifstream u_in = open_in(base + "_u.bin");
  std::ifstream ut_in = open_in(base + "_ut.bin");
  for (std::size_t k = 0; k < snapshots; ++k) {
    Field u = zero_field(grid, channels, Space::Physical);
    Field ut = zero_field(grid, channels, Space::Physical);
    u_in.read(reinterpret_cast<char*>(u.data.data()),
              std::streamsize(u.data.size() * sizeof(cplx)));
    ut_in.read(reinterpret_cast<char*>(ut.data.data()),
               std::streamsize(ut.data.size() * sizeof(cplx)));
    if (!u_in || !ut_in)
      throw ConfigError("field io: timeline binary shorter than sidecar");
    sol.u.push_back(std::move(u));
    sol.ut.push_back(std::move(ut));
  }
  sol.u0_hat = zero_field(grid, channels, Space::Frequency);
  sol.u1_hat = zero_field(grid, channels, Space::Frequency);
  return sol;
}

}  // namespace nlwave
