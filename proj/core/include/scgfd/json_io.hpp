#pragma once

#include <string>
#include <vector>

#include "scgfd/criterion.hpp"
#include "scgfd/ftadmg.hpp"
#include "scgfd/sim.hpp"

namespace scgfd {

// Compact JSON renderings of the library's reports. Keys keep a fixed order
// so that outputs are byte-stable.
std::string criterion_report_json(const CriterionReport &r);
std::string search_result_json(const std::vector<SearchHit> &hits);
std::string verification_report_json(const VerificationReport &r);
std::string compare_report_json(const CompareReport &r);
std::string compare_reports_json(const std::vector<CompareReport> &rs);
std::string query_json(const EffectQuery &q);

}  // namespace scgfd
