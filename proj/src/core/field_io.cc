#include "ldm/core/field_io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ldm {

namespace {

nlohmann::json AxesToJson(const std::vector<GridAxis>& axes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const GridAxis& ax : axes) arr.push_back({{"lo", ax.lo}, {"hi", ax.hi}, {"count", ax.count}});
  return arr;
}

std::vector<GridAxis> AxesFromJson(const nlohmann::json& arr) {
  std::vector<GridAxis> axes;
  for (const auto& a : arr) {
    axes.push_back({a.at("lo").get<double>(), a.at("hi").get<double>(), a.at("count").get<int>()});
  }
  return axes;
}

std::string StripSuffix(const std::string& stem) {
  for (const char* suf : {".csv", ".json"}) {
    const std::string s(suf);
    if (stem.size() > s.size() && stem.compare(stem.size() - s.size(), s.size(), s) == 0) {
      return stem.substr(0, stem.size() - s.size());
    }
  }
  return stem;
}

}  // namespace

nlohmann::json GridToJson(const StateActionGrid& grid) {
  bool degenerate = false;
  for (const auto& ax : grid.state_axes()) degenerate |= ax.count == 1;
  for (const auto& ax : grid.action_axes()) degenerate |= ax.count == 1;
  return {{"state_axes", AxesToJson(grid.state_axes())},
          {"action_axes", AxesToJson(grid.action_axes())},
          {"allow_degenerate", degenerate}};
}

StateActionGrid GridFromJson(const nlohmann::json& j) {
  return StateActionGrid(AxesFromJson(j.at("state_axes")), AxesFromJson(j.at("action_axes")),
                         j.value("allow_degenerate", false));
}

void WriteJson(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

nlohmann::json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

void WriteField(const ScalarField& field, const std::string& stem,
                const nlohmann::json& meta) {
  const std::string base = StripSuffix(stem);
  const StateActionGrid& g = field.grid();
  {
    std::ofstream out(base + ".csv");
    if (!out) throw std::runtime_error("cannot write " + base + ".csv");
    out << "idx";
    for (int i = 0; i < g.state_dim(); ++i) out << ",s" << i;
    for (int i = 0; i < g.action_dim(); ++i) out << ",a" << i;
    out << ",value\n";
    std::vector<double> s(g.state_dim()), a(g.action_dim());
    char buf[32];
    for (std::size_t c = 0; c < g.num_cells(); ++c) {
      g.StateNodeInto(g.StateOfCell(c), s);
      g.ActionNodeInto(g.ActionOfCell(c), a);
      out << c;
      for (double x : s) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << ',' << buf;
      }
      for (double x : a) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << ',' << buf;
      }
      std::snprintf(buf, sizeof(buf), "%.17g", field[c]);
      out << ',' << buf << '\n';
    }
  }
  nlohmann::json side = {{"grid", GridToJson(g)},
                         {"role", ToString(field.role())},
                         {"sentinel", field.sentinel()},
                         {"num_cells", g.num_cells()},
                         {"meta", meta}};
  WriteJson(side, base + ".json");
}

ScalarField ReadField(const std::string& stem) {
  const std::string base = StripSuffix(stem);
  const nlohmann::json side = ReadJson(base + ".json");
  auto grid = std::make_shared<const StateActionGrid>(GridFromJson(side.at("grid")));
  std::ifstream in(base + ".csv");
  if (!in) throw std::runtime_error("cannot open " + base + ".csv");
  std::string line;
  std::getline(in, line);
  std::vector<double> values(grid->num_cells(), 0.0);
  std::vector<bool> seen(values.size(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto first = line.find(',');
    const auto last = line.rfind(',');
    if (first == std::string::npos) {
      throw std::runtime_error(base + ".csv line " + std::to_string(line_no) + ": malformed");
    }
    std::size_t idx = std::stoull(line.substr(0, first));
    double v = 0.0;
    const char* b = line.data() + last + 1;
    const char* e = line.data() + line.size();
    if (e > b && e[-1] == '\r') --e;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || idx >= values.size()) {
      throw std::runtime_error(base + ".csv line " + std::to_string(line_no) + ": malformed");
    }
    values[idx] = v;
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw std::runtime_error(base + ".csv: missing cell " + std::to_string(i));
  }
  return ScalarField(grid, std::move(values), FieldRoleFromString(side.at("role")),
                     side.at("sentinel").get<double>());
}

}  // namespace ldm
