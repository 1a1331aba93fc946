#include "pinstop/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace pinstop {

std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_field_csv(std::ostream& os, const ValueField& field,
                     const RegionMap& regions) {
  os << "t,z,value,gap,label,flags\n";
  for (int it = 0; it < field.n_t(); ++it) {
    for (int iz = 0; iz < field.n_z(); ++iz) {
      std::uint8_t f = regions.flag(it, iz);
      const char* label = (f & region_flag::kStop) ? "stop" : "continue";
      std::string flags;
      if (f & region_flag::kStopLoss) flags = "stop_loss";
      if (f & region_flag::kTooGood) {
        if (!flags.empty()) flags += ';';
        flags += "too_good";
      }
      os << fmt12(field.times[static_cast<std::size_t>(it)]) << ','
         << fmt12(field.zs[static_cast<std::size_t>(iz)]) << ','
         << fmt12(field.value(it, iz)) << ',' << fmt12(field.gap(it, iz)) << ','
         << label << ',' << flags << '\n';
    }
  }
}

void write_boundaries_csv(std::ostream& os, const std::vector<Boundary>& bs) {
  os << "t,level,kind\n";
  for (const auto& b : bs) {
    const char* kind = b.kind == Boundary::Kind::Upper   ? "upper"
                       : b.kind == Boundary::Kind::Lower ? "lower"
                                                         : "multiple";
    for (std::size_t i = 0; i < b.times.size(); ++i)
      os << fmt12(b.times[i]) << ',' << fmt12(b.levels[i]) << ',' << kind
         << '\n';
  }
}

void write_classify_csv(std::ostream& os, const Prior& prior,
                        const std::vector<double>& times,
                        const std::vector<double>& zs) {
  os << "t,z,layer\n";
  for (double t : times)
    for (double z : zs) {
      PointClass pc = classify_point(prior, t, z);
      for (const auto& w : pc.witnesses)
        os << fmt12(t) << ',' << fmt12(z) << ',' << w << '\n';
    }
}

nlohmann::json sim_result_json(const SimResult& r, const std::string& rule_tag) {
  return nlohmann::json{{"mean", r.mean},
                        {"std_error", r.std_error},
                        {"n_paths", r.n_paths},
                        {"seed", r.seed},
                        {"rule", rule_tag}};
}

CsvTable read_csv(std::istream& is) {
  CsvTable out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      out.header = std::move(cells);
      first = false;
    } else {
      out.rows.push_back(std::move(cells));
    }
  }
  return out;
}

}  // namespace pinstop
