#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "holab/carleson.hpp"
#include "holab/functionals.hpp"
#include "holab/growth.hpp"
#include "holab/lemmas.hpp"
#include "holab/modulus.hpp"

namespace holab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal for finite values; "inf", "-inf", "nan" as strings.
Json json_number(double v);
/// 12 significant digits.
std::string csv_number(double v);

Json to_json(const Vec& v);
Json to_json(const DoublingReport& r);
Json to_json(const Classification& c);
Json to_json(const CriterionResult& r);
Json to_json(const CriterionReport& r);
Json to_json(const MembershipReport& r);
Json to_json(const LemmaSuite& s);
/// rho and cell centers are left out; write_rho_csv dumps them.
Json to_json(const ModulusEstimate& e);
Json to_json(const QuasiInvarianceReport& r);
Json to_json(const CarlesonEstimate& e);

/// Document envelope: schema id and version, command, recorded config, result.
Json envelope(const std::string& schema, const std::string& command, const Json& config, Json result);

/// Two-space indented JSON plus a trailing newline.
std::string dump(const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// One row per criterion per scanned delta (criteria without delta get one row).
void write_report_csv(const MembershipReport& r, std::ostream& out);
/// k,u,partial for one criterion.
void write_plot_data(const CriterionResult& r, std::ostream& out);
/// File stem for a criterion's plot data, e.g. component_ntmax-2-quadrature.
std::string plot_stem(const CriterionResult& r);

}  // namespace holab
