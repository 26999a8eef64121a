#include "liwo/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "liwo/errors.hpp"

namespace liwo {

namespace {

std::ifstream open_in(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

// Splits one CSV line into exactly `n` doubles.
std::vector<double> parse_row(const std::string &line, size_t n,
                              const std::string &path, int lineno) {
  std::vector<double> out;
  out.reserve(n);
  size_t pos = 0;
  while (pos <= line.size()) {
    size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string tok = line.substr(pos, comma - pos);
    double v = 0.0;
    const char *b = tok.data();
    const char *e = tok.data() + tok.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{})
      throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" +
                    tok + "'");
    out.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  if (out.size() != n)
    throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                  std::to_string(n) + " fields, got " +
                  std::to_string(out.size()));
  return out;
}

// Shortest round-trip formatting for reproducible files.
std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

bool data_line(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.empty() || line[0] == '#') return false;
  return true;
}

}  // namespace

std::vector<ImuSample> read_imu_csv(const std::string &path) {
  std::ifstream in = open_in(path);
  std::vector<ImuSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    const std::vector<double> v = parse_row(line, 7, path, lineno);
    out.push_back({v[0], Vec3(v[1], v[2], v[3]), Vec3(v[4], v[5], v[6])});
  }
  return out;
}

void write_imu_csv(const std::string &path, const std::vector<ImuSample> &imu) {
  std::ofstream out = open_out(path);
  out << "# stamp,wx,wy,wz,ax,ay,az\n";
  for (const ImuSample &s : imu)
    out << fmt(s.stamp) << ',' << fmt(s.gyro.x()) << ',' << fmt(s.gyro.y())
        << ',' << fmt(s.gyro.z()) << ',' << fmt(s.accel.x()) << ','
        << fmt(s.accel.y()) << ',' << fmt(s.accel.z()) << '\n';
}

std::vector<WheelSample> read_wheel_csv(const std::string &path) {
  std::ifstream in = open_in(path);
  std::vector<WheelSample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    const std::vector<double> v = parse_row(line, 3, path, lineno);
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

void write_wheel_csv(const std::string &path,
                     const std::vector<WheelSample> &wheel) {
  std::ofstream out = open_out(path);
  out << "# stamp,tau_left,tau_right\n";
  for (const WheelSample &s : wheel)
    out << fmt(s.stamp) << ',' << fmt(s.tau_left) << ',' << fmt(s.tau_right)
        << '\n';
}

std::vector<Sweep> read_lidar_csv(const std::string &path) {
  std::ifstream in = open_in(path);
  std::vector<Sweep> sweeps;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    const std::vector<double> v = parse_row(line, 5, path, lineno);
    const int idx = static_cast<int>(v[0]);
    if (sweeps.empty() || sweeps.back().index != idx) {
      if (!sweeps.empty() && idx != sweeps.back().index + 1)
        throw IoError(path + ":" + std::to_string(lineno) +
                      ": non-consecutive sweep index");
      sweeps.push_back(Sweep{{}, v[1], v[1], idx});
    }
    Sweep &sw = sweeps.back();
    sw.points.push_back({Vec3(v[2], v[3], v[4]), v[1]});
    sw.t_b = std::min(sw.t_b, v[1]);
    sw.t_e = std::max(sw.t_e, v[1]);
  }
  return sweeps;
}

void write_lidar_csv(const std::string &path, const std::vector<Sweep> &sweeps) {
  std::ofstream out = open_out(path);
  out << "# sweep_index,stamp,x,y,z\n";
  for (const Sweep &sw : sweeps)
    for (const TimedPoint &p : sw.points)
      out << sw.index << ',' << fmt(p.stamp) << ',' << fmt(p.p.x()) << ','
          << fmt(p.p.y()) << ',' << fmt(p.p.z()) << '\n';
}

std::vector<TrajectoryRecord> read_trajectory(const std::string &path) {
  std::ifstream in = open_in(path);
  std::vector<TrajectoryRecord> out;
  std::string line;
  int lineno = 0;
  double last_stamp = -1e300;
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    const std::vector<double> v = parse_row(line, 9, path, lineno);
    TrajectoryRecord r;
    r.index = static_cast<int>(v[0]);
    r.stamp = v[1];
    r.t = Vec3(v[2], v[3], v[4]);
    r.q = Quat(v[8], v[5], v[6], v[7]).normalized();  // file order x,y,z,w
    if (r.stamp <= last_stamp)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": stamps not strictly increasing");
    last_stamp = r.stamp;
    out.push_back(r);
  }
  return out;
}

void write_trajectory(const std::string &path,
                      const std::vector<TrajectoryRecord> &records) {
  std::ofstream out = open_out(path);
  out << "# index,stamp,tx,ty,tz,qx,qy,qz,qw\n";
  for (const TrajectoryRecord &r : records)
    out << r.index << ',' << fmt(r.stamp) << ',' << fmt(r.t.x()) << ','
        << fmt(r.t.y()) << ',' << fmt(r.t.z()) << ',' << fmt(r.q.x()) << ','
        << fmt(r.q.y()) << ',' << fmt(r.q.z()) << ',' << fmt(r.q.w()) << '\n';
}

std::vector<NavState> read_states_csv(const std::string &path) {
  std::ifstream in = open_in(path);
  std::vector<NavState> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    const std::vector<double> v = parse_row(line, 17, path, lineno);
    out.emplace_back(Vec3(v[1], v[2], v[3]),
                     Quat(v[7], v[4], v[5], v[6]).normalized(),
                     Vec3(v[8], v[9], v[10]), Vec3(v[11], v[12], v[13]),
                     Vec3(v[14], v[15], v[16]), v[0]);
  }
  return out;
}

void write_states_csv(const std::string &path,
                      const std::vector<NavState> &states) {
  std::ofstream out = open_out(path);
  out << "# stamp,tx,ty,tz,qx,qy,qz,qw,vx,vy,vz,bax,bay,baz,bwx,bwy,bwz\n";
  for (const NavState &s : states)
    out << fmt(s.stamp) << ',' << fmt(s.t.x()) << ',' << fmt(s.t.y()) << ','
        << fmt(s.t.z()) << ',' << fmt(s.q.x()) << ',' << fmt(s.q.y()) << ','
        << fmt(s.q.z()) << ',' << fmt(s.q.w()) << ',' << fmt(s.v.x()) << ','
        << fmt(s.v.y()) << ',' << fmt(s.v.z()) << ',' << fmt(s.b_a.x()) << ','
        << fmt(s.b_a.y()) << ',' << fmt(s.b_a.z()) << ',' << fmt(s.b_w.x())
        << ',' << fmt(s.b_w.y()) << ',' << fmt(s.b_w.z()) << '\n';
}

void write_ply(const std::string &path, const std::vector<Vec3> &points) {
  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
         "end_header\n";
  for (const Vec3 &p : points)
    out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << '\n';
}

std::map<std::string, std::string> read_config(const std::string &path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char *ws = " \t";
    const size_t b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const size_t e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!data_line(line)) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw IoError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

double config_get(const std::map<std::string, std::string> &cfg,
                  const std::string &key, double fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  double v = 0.0;
  const char *b = it->second.data();
  auto [p, ec] = std::from_chars(b, b + it->second.size(), v);
  if (ec != std::errc{})
    throw IoError("config key '" + key + "': bad number '" + it->second + "'");
  return v;
}

int config_get(const std::map<std::string, std::string> &cfg,
               const std::string &key, int fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  int v = 0;
  const char *b = it->second.data();
  auto [p, ec] = std::from_chars(b, b + it->second.size(), v);
  if (ec != std::errc{})
    throw IoError("config key '" + key + "': bad integer '" + it->second + "'");
  return v;
}

std::string config_get(const std::map<std::string, std::string> &cfg,
                       const std::string &key, const std::string &fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

}  // namespace liwo
