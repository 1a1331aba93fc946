#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinstop/dp_solver.hpp"
#include "pinstop/montecarlo.hpp"
#include "pinstop/prior.hpp"
#include "pinstop/regions.hpp"

// Plot-ready artifacts.  All CSVs are long format (one row per grid node),
// headers fixed per writer, floats at 12 significant digits so identical
// runs produce byte-identical files.

namespace pinstop {

inline constexpr const char* kArtifactVersion = "0.1.0";

std::string fmt12(double x);

// header: t,z,value,gap,label,flags
void write_field_csv(std::ostream& os, const ValueField& field,
                     const RegionMap& regions);

// header: t,level,kind
void write_boundaries_csv(std::ostream& os, const std::vector<Boundary>& bs);

// header: t,z,layer -- one row per (node, analytic layer) membership
void write_classify_csv(std::ostream& os, const Prior& prior,
                        const std::vector<double>& times,
                        const std::vector<double>& zs);

nlohmann::json sim_result_json(const SimResult& r, const std::string& rule_tag);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Minimal reader for the files written above (no quoting in our schemas).
CsvTable read_csv(std::istream& is);

}  // namespace pinstop
