#pragma once

#include <string>

#include <json.hpp>

#include "nlwave/oracle.hpp"
#include "nlwave/picard.hpp"
#include "nlwave/suites.hpp"
#include "nlwave/timeline.hpp"

namespace nlwave {

// Reports are insertion-ordered JSON so identical runs serialize to identical
// bytes. Wall-clock timings live under the single top-level "timings" key;
// strip_timings removes it for byte-level determinism comparisons.
using ojson = nlohmann::ordered_json;

ojson to_json(const LinearDiagnostics& d);
ojson to_json(const PicardReport& r);
ojson to_json(const IdentityReport& r);
ojson to_json(const ResidualReport& r);
ojson to_json(const EstimateReport& r);
ojson to_json(const OracleComparison& c);

ojson strip_timings(const ojson& report);

// Flat key/value table of every leaf in the report (arrays elided to their
// extrema so the text stays readable; the JSON carries the full data).
std::string render_text(const ojson& report);

// report.json + report.txt under dir (created if needed).
void write_report(const std::string& dir, const ojson& report);

// Per-sample norm history: t, sobolev(u), sup|Au|, sobolev(u_t), sup|Au_t|.
void write_norm_csv(const std::string& path, const SolutionTimeline& sol,
                    const OperatorFamily& fam, double s, double p, double q);

}  // namespace nlwave
