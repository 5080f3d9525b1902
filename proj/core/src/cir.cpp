#include "aci/cir.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aci {

double profile_peak(const std::vector<double>& profile) {
  double peak = 0.0;
  for (double v : profile) peak = std::max(peak, v);
  return peak;
}

namespace {

double norm_ratio_length(const std::vector<double>& profile, double dt_eff) {
  const double peak = profile_peak(profile);
  if (peak <= 0.0) return 0.0;
  double sum = 0.0;
  for (double v : profile) sum += v;
  return dt_eff * sum / peak;
}

// (value, index) pairs for the positive entries, sorted by value.
std::vector<std::pair<double, int>> positive_entries(
    const std::vector<double>& profile, bool descending) {
  std::vector<std::pair<double, int>> pv;
  for (size_t i = 0; i < profile.size(); ++i)
    if (profile[i] > 0.0) pv.emplace_back(profile[i], static_cast<int>(i));
  if (descending)
    std::sort(pv.begin(), pv.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
  else
    std::sort(pv.begin(), pv.end());
  return pv;
}

}  // namespace

double forward_length_approx(const std::vector<double>& profile,
                             double dt_eff) {
  return norm_ratio_length(profile, dt_eff);
}

double forward_length_subjective(const std::vector<double>& profile,
                                 double dt_eff, double span, double eps) {
  int last = -1;
  for (size_t i = 0; i < profile.size(); ++i)
    if (profile[i] > eps) last = static_cast<int>(i);
  if (last < 0) return 0.0;
  return std::min((last + 1) * dt_eff, span);
}

double forward_length_exact(const std::vector<double>& profile, double dt_eff,
                            double span) {
  const double peak = profile_peak(profile);
  if (peak <= 0.0) return 0.0;
  // Sweep thresholds downward; the exceedance set only ever gains indices, so
  // the rightmost exceeding index is a running maximum over the sorted values.
  const auto pv = positive_entries(profile, /*descending=*/true);
  double total = 0.0;
  double upper = peak;
  int last = -1;
  size_t i = 0;
  while (i < pv.size()) {
    const double v = pv[i].first;
    if (v < upper) {
      const double tau = last < 0 ? 0.0 : std::min((last + 1) * dt_eff, span);
      total += (upper - v) * tau;
      upper = v;
    }
    while (i < pv.size() && pv[i].first == v) {
      last = std::max(last, pv[i].second);
      ++i;
    }
  }
  if (upper > 0.0) {
    const double tau = last < 0 ? 0.0 : std::min((last + 1) * dt_eff, span);
    total += upper * tau;
  }
  return total / peak;
}

double backward_length_approx(const std::vector<double>& profile,
                              double dt_eff) {
  return norm_ratio_length(profile, dt_eff);
}

double backward_length_subjective(const std::vector<double>& profile,
                                  double dt_eff, double horizon, double eps) {
  if (eps < 0.0) return 0.0;
  int last = -1;
  for (size_t i = 0; i < profile.size(); ++i)
    if (profile[i] <= eps) last = static_cast<int>(i);
  if (last < 0) return horizon;
  return horizon - last * dt_eff;
}

double backward_length_exact(const std::vector<double>& profile, double dt_eff,
                             double horizon) {
  const double peak = profile_peak(profile);
  if (peak <= 0.0) return 0.0;
  // Sweep thresholds upward; the below-threshold set only gains indices.
  std::vector<std::pair<double, int>> pv;
  for (size_t i = 0; i < profile.size(); ++i)
    pv.emplace_back(profile[i], static_cast<int>(i));
  std::sort(pv.begin(), pv.end());
  double total = 0.0;
  double lower = 0.0;
  int last = -1;
  size_t i = 0;
  while (i < pv.size() && lower < peak) {
    const double v = pv[i].first;
    if (v > lower) {
      const double tau = last < 0 ? horizon : horizon - last * dt_eff;
      total += (std::min(v, peak) - lower) * tau;
      lower = v;
    }
    while (i < pv.size() && pv[i].first == v) {
      last = std::max(last, pv[i].second);
      ++i;
    }
  }
  return total / peak;
}

void write_cir_csv(const CirSeries& series, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  std::fputs("t,aci,aci_signal,aci_dispersion,tau_f_approx,tau_b_approx", f);
  if (series.has_exact) std::fputs(",tau_f_exact,tau_b_exact", f);
  std::fputs(",Mf,Mb,flags\n", f);
  for (const CirPoint& p : series.points) {
    std::fprintf(f, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g", p.t, p.aci.total(),
                 p.aci.signal, p.aci.dispersion, p.tau_f_approx,
                 p.tau_b_approx);
    if (series.has_exact)
      std::fprintf(f, ",%.12g,%.12g", p.tau_f_exact, p.tau_b_exact);
    std::fprintf(f, ",%.12g,%.12g,", p.peak_f, p.peak_b);
    bool first = true;
    auto tok = [&](bool on, const char* name) {
      if (!on) return;
      if (!first) std::fputc(';', f);
      std::fputs(name, f);
      first = false;
    };
    tok(p.weak_forward, "weak_f");
    tok(p.weak_backward, "weak_b");
    tok(p.forward_truncated, "truncated_f");
    std::fputc('\n', f);
  }
  std::fclose(f);
}

CirSeries read_cir_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::string line;
  if (!std::getline(in, line))
    throw Error(fmt::format("'{}' is empty", path));

  const std::string base = "t,aci,aci_signal,aci_dispersion,tau_f_approx,tau_b_approx";
  CirSeries s;
  if (line == base + ",tau_f_exact,tau_b_exact,Mf,Mb,flags")
    s.has_exact = true;
  else if (line != base + ",Mf,Mb,flags")
    throw Error(fmt::format("'{}': unrecognized header '{}'", path, line));

  const size_t want = s.has_exact ? 11 : 9;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();  // empty flags cell
    if (cells.size() != want)
      throw Error(fmt::format("{}:{}: expected {} columns, found {}", path,
                              lineno, want, cells.size()));
    auto num = [&](size_t i) {
      try {
        return std::stod(cells[i]);
      } catch (const std::exception&) {
        throw Error(fmt::format("{}:{}: bad number '{}'", path, lineno,
                                cells[i]));
      }
    };
    CirPoint p;
    p.t = num(0);
    p.aci.signal = num(2);
    p.aci.dispersion = num(3);
    p.tau_f_approx = num(4);
    p.tau_b_approx = num(5);
    size_t i = 6;
    if (s.has_exact) {
      p.tau_f_exact = num(6);
      p.tau_b_exact = num(7);
      i = 8;
    }
    p.peak_f = num(i);
    p.peak_b = num(i + 1);
    std::stringstream fl(cells[i + 2]);
    std::string tok;
    while (std::getline(fl, tok, ';')) {
      if (tok == "weak_f")
        p.weak_forward = true;
      else if (tok == "weak_b")
        p.weak_backward = true;
      else if (tok == "truncated_f")
        p.forward_truncated = true;
      else if (!tok.empty())
        throw Error(fmt::format("{}:{}: unknown flag '{}'", path, lineno, tok));
    }
    s.points.push_back(p);
  }
  return s;
}

}  // namespace aci
