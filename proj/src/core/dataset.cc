#include "ldm/core/dataset.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ldm {

namespace {

std::string FormatReal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool Within(const std::vector<GridAxis>& axes, const Eigen::VectorXd& v) {
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (!(v[d] >= axes[d].lo && v[d] <= axes[d].hi)) return false;
  }
  return true;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseReal(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad real '" + text + "'");
  }
  return v;
}

}  // namespace

TransitionDataset::TransitionDataset(int state_dim, int action_dim)
    : state_dim_(state_dim), action_dim_(action_dim) {
  if (state_dim < 1 || action_dim < 0) throw std::invalid_argument("bad dataset dimensions");
}

void TransitionDataset::SetBounds(const StateActionGrid& grid) {
  if (grid.state_dim() != state_dim_ || grid.action_dim() != action_dim_) {
    throw std::invalid_argument("bounds dimension mismatch");
  }
  has_bounds_ = true;
  state_bounds_ = grid.state_axes();
  action_bounds_ = grid.action_axes();
}

bool TransitionDataset::Add(Transition record) {
  if (record.state.size() != state_dim_ || record.action.size() != action_dim_ ||
      record.next_state.size() != state_dim_) {
    throw std::invalid_argument("transition dimension mismatch");
  }
  if (has_bounds_ &&
      (!Within(state_bounds_, record.state) || !Within(action_bounds_, record.action))) {
    ++rejected_;
    return false;
  }
  records_.push_back(std::move(record));
  return true;
}

void TransitionDataset::WriteCsv(std::ostream& out) const {
  for (int i = 0; i < state_dim_; ++i) out << (i ? "," : "") << "s" << i;
  for (int i = 0; i < action_dim_; ++i) out << ",a" << i;
  for (int i = 0; i < state_dim_; ++i) out << ",sp" << i;
  out << "\n";
  for (const Transition& r : records_) {
    for (int i = 0; i < state_dim_; ++i) out << (i ? "," : "") << FormatReal(r.state[i]);
    for (int i = 0; i < action_dim_; ++i) out << "," << FormatReal(r.action[i]);
    for (int i = 0; i < state_dim_; ++i) out << "," << FormatReal(r.next_state[i]);
    out << "\n";
  }
}

void TransitionDataset::WriteCsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  WriteCsv(out);
}

TransitionDataset TransitionDataset::ReadCsv(std::istream& in, const StateActionGrid* bounds) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = SplitCsv(line);
  int ns = 0, na = 0, nsp = 0;
  for (const std::string& h : header) {
    const int expect_s = ns, expect_a = na, expect_sp = nsp;
    if (h == "s" + std::to_string(expect_s) && na == 0 && nsp == 0) {
      ++ns;
    } else if (h == "a" + std::to_string(expect_a) && nsp == 0) {
      ++na;
    } else if (h == "sp" + std::to_string(expect_sp)) {
      ++nsp;
    } else {
      throw std::runtime_error("line 1: unexpected column '" + h + "'");
    }
  }
  if (ns == 0 || nsp != ns) throw std::runtime_error("line 1: header must be s0..,a0..,sp0..");
  TransitionDataset ds(ns, na);
  if (bounds) ds.SetBounds(*bounds);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitCsv(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " columns");
    }
    Transition t{Eigen::VectorXd(ns), Eigen::VectorXd(na), Eigen::VectorXd(ns)};
    for (int i = 0; i < ns; ++i) t.state[i] = ParseReal(cells[i], line_no);
    for (int i = 0; i < na; ++i) t.action[i] = ParseReal(cells[ns + i], line_no);
    for (int i = 0; i < ns; ++i) t.next_state[i] = ParseReal(cells[ns + na + i], line_no);
    ds.Add(std::move(t));
  }
  return ds;
}

TransitionDataset TransitionDataset::ReadCsv(const std::string& path,
                                             const StateActionGrid* bounds) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return ReadCsv(in, bounds);
}

}  // namespace ldm
