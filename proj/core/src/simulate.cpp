#include "aci/simulate.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aci/rng.hpp"

namespace aci {

void CgnsModel::check() const {
  if (obs_dim <= 0 || hidden_dim <= 0)
    throw Error(fmt::format("CgnsModel '{}': dims must be positive (k={}, l={})",
                            name, obs_dim, hidden_dim));
  if (nchan1 < 0 || nchan2 < 0 || nchan() == 0)
    throw Error(fmt::format("CgnsModel '{}': needs at least one noise channel", name));
  if (nchan() > static_cast<int>(rng::kMaxChannels))
    throw Error(fmt::format("CgnsModel '{}': {} channels exceeds the stream limit {}",
                            name, nchan(), rng::kMaxChannels));
  if (!coupling || !obs_forcing || !feedback || !hidden_forcing ||
      !obs_noise_1 || !obs_noise_2 || !hidden_noise_1 || !hidden_noise_2)
    throw Error(fmt::format("CgnsModel '{}': all eight evaluators must be set", name));
}

Mat noise_gram(const Mat& a1, const Mat& a2, const Mat& b1, const Mat& b2) {
  return a1 * b1.transpose() + a2 * b2.transpose();
}

int Trajectory::index_of(double t) const {
  const int n = static_cast<int>(std::lround((t - t0) / dt));
  return std::clamp(n, 0, steps());
}

void euler_maruyama_step(const CgnsModel& m, double t, double dt,
                         const Vec& x, const Vec& y,
                         const Vec& dw1, const Vec& dw2,
                         Vec& x_next, Vec& y_next) {
  x_next = x + (m.coupling(t, x) * y + m.obs_forcing(t, x)) * dt +
           m.obs_noise_1(t, x) * dw1 + m.obs_noise_2(t, x) * dw2;
  y_next = y + (m.feedback(t, x) * y + m.hidden_forcing(t, x)) * dt +
           m.hidden_noise_1(t, x) * dw1 + m.hidden_noise_2(t, x) * dw2;
}

Trajectory simulate(const CgnsModel& m, const SimulateOptions& opt) {
  m.check();
  if (opt.x0.size() != m.obs_dim || opt.y0.size() != m.hidden_dim)
    throw Error(fmt::format("simulate: initial condition dims ({}, {}) do not match model ({}, {})",
                            opt.x0.size(), opt.y0.size(), m.obs_dim, m.hidden_dim));
  if (!(opt.dt > 0.0) || !(opt.t_end > opt.t0))
    throw Error("simulate: need dt > 0 and t_end > t0");

  const int n_steps = static_cast<int>(std::lround((opt.t_end - opt.t0) / opt.dt));
  const double sqdt = std::sqrt(opt.dt);

  Trajectory tr;
  tr.t0 = opt.t0;
  tr.dt = opt.dt;
  tr.obs_dim = m.obs_dim;
  tr.hidden_dim = opt.store_hidden ? m.hidden_dim : 0;
  tr.seed = opt.seed;
  tr.model_name = m.name;
  tr.state.resize(n_steps + 1, m.obs_dim + tr.hidden_dim);

  Vec x = opt.x0, y = opt.y0, xn(m.obs_dim), yn(m.hidden_dim);
  Vec dw1(m.nchan1), dw2(m.nchan2);
  auto record = [&](int j, const Vec& xv, const Vec& yv) {
    tr.state.row(j).head(m.obs_dim) = xv;
    if (opt.store_hidden) tr.state.row(j).tail(m.hidden_dim) = yv;
  };
  record(0, x, y);

  for (int j = 0; j < n_steps; ++j) {
    const double t = opt.t0 + j * opt.dt;
    for (int c = 0; c < m.nchan1; ++c)
      dw1[c] = sqdt * rng::normal(opt.seed, static_cast<std::uint64_t>(j), c);
    for (int c = 0; c < m.nchan2; ++c)
      dw2[c] = sqdt * rng::normal(opt.seed, static_cast<std::uint64_t>(j), m.nchan1 + c);
    euler_maruyama_step(m, t, opt.dt, x, y, dw1, dw2, xn, yn);
    if (!xn.allFinite() || !yn.allFinite())
      throw Error(fmt::format("simulate: state blew up at step {} (t={:.6g}); "
                              "reduce dt or check the model", j + 1, t + opt.dt));
    x.swap(xn);
    y.swap(yn);
    record(j + 1, x, y);
  }
  return tr;
}

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  std::fputs("t", f);
  for (int i = 0; i < tr.obs_dim; ++i) std::fprintf(f, ",x_%d", i);
  for (int i = 0; i < tr.hidden_dim; ++i) std::fprintf(f, ",y_%d", i);
  std::fputc('\n', f);
  const int cols = tr.obs_dim + tr.hidden_dim;
  for (int j = 0; j <= tr.steps(); ++j) {
    std::fprintf(f, "%.12g", tr.time(j));
    for (int c = 0; c < cols; ++c) std::fprintf(f, ",%.12g", tr.state(j, c));
    std::fputc('\n', f);
  }
  std::fclose(f);

  std::ofstream meta(path + ".meta");
  if (!meta) throw Error(fmt::format("cannot open '{}' for writing", path + ".meta"));
  meta << "model=" << tr.model_name << "\n"
       << "seed=" << tr.seed << "\n"
       << fmt::format("t0={:.12g}\ndt={:.12g}\n", tr.t0, tr.dt)
       << "steps=" << tr.steps() << "\n"
       << "obs_dim=" << tr.obs_dim << "\n"
       << "hidden_dim=" << tr.hidden_dim << "\n";
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(fmt::format("cannot open '{}'", path));
  std::string header;
  if (!std::getline(f, header)) throw Error(fmt::format("'{}': empty file", path));

  int k = 0, l = 0;
  {
    std::stringstream hs(header);
    std::string tok;
    bool first = true;
    while (std::getline(hs, tok, ',')) {
      if (first) {
        if (tok != "t") throw Error(fmt::format("'{}': first column must be 't', got '{}'", path, tok));
        first = false;
      } else if (tok.rfind("x_", 0) == 0) {
        ++k;
      } else if (tok.rfind("y_", 0) == 0) {
        ++l;
      } else {
        throw Error(fmt::format("'{}': unrecognized column '{}'", path, tok));
      }
    }
  }
  if (k == 0) throw Error(fmt::format("'{}': no observed columns", path));

  std::vector<double> times;
  std::vector<double> data;
  std::string line;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string tok;
    int col = -1;
    while (std::getline(ls, tok, ',')) {
      double v;
      try {
        v = std::stod(tok);
      } catch (const std::exception&) {
        throw Error(fmt::format("'{}' line {}: bad number '{}'", path, lineno, tok));
      }
      if (col < 0)
        times.push_back(v);
      else
        data.push_back(v);
      ++col;
    }
    if (col != k + l)
      throw Error(fmt::format("'{}' line {}: expected {} columns, got {}", path, lineno, 1 + k + l, 1 + col));
  }
  if (times.size() < 2) throw Error(fmt::format("'{}': need at least two rows", path));

  Trajectory tr;
  tr.obs_dim = k;
  tr.hidden_dim = l;
  tr.t0 = times.front();
  tr.dt = times[1] - times[0];
  tr.model_name = path;
  tr.state.resize(static_cast<Eigen::Index>(times.size()), k + l);
  for (size_t j = 0; j < times.size(); ++j)
    for (int c = 0; c < k + l; ++c) tr.state(static_cast<Eigen::Index>(j), c) = data[j * (k + l) + c];

  // The sidecar restores what the CSV cannot carry exactly: the grid origin
  // and spacing at full precision, the seed, and the model name.  A bare CSV
  // without a sidecar still loads, with those fields derived from the data.
  const std::string meta_path = path + ".meta";
  std::ifstream meta(meta_path);
  if (meta) {
    std::string entry;
    int mline = 0;
    while (std::getline(meta, entry)) {
      ++mline;
      if (entry.empty()) continue;
      const size_t eq = entry.find('=');
      if (eq == std::string::npos)
        throw Error(fmt::format("'{}' line {}: expected key=value", meta_path, mline));
      const std::string key = entry.substr(0, eq);
      const std::string val = entry.substr(eq + 1);
      try {
        if (key == "model") {
          tr.model_name = val;
        } else if (key == "seed") {
          tr.seed = std::stoull(val);
        } else if (key == "t0") {
          tr.t0 = std::stod(val);
        } else if (key == "dt") {
          tr.dt = std::stod(val);
        } else if (key == "steps" || key == "obs_dim" || key == "hidden_dim") {
          const long long have = key == "steps" ? tr.steps()
                                 : key == "obs_dim" ? k : l;
          if (std::stoll(val) != have)
            throw Error(fmt::format("'{}': {} is {} but the CSV holds {}",
                                    meta_path, key, val, have));
        } else {
          throw Error(fmt::format("'{}' line {}: unknown key '{}'", meta_path,
                                  mline, key));
        }
      } catch (const Error&) {
        throw;
      } catch (const std::exception&) {
        throw Error(fmt::format("'{}' line {}: bad value '{}' for '{}'",
                                meta_path, mline, val, key));
      }
    }
  }
  return tr;
}

}  // namespace aci
