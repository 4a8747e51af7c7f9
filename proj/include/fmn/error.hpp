#ifndef FMN_ERROR_HPP
#define FMN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace fmn {

/// Failure categories. Every operation that can fail throws fmn::Error
/// carrying one of these, so callers (CLI, service) can map them to exit
/// codes and HTTP statuses without parsing messages.
enum class Errc {
  invalid_argument,
  negative_mass,
  unknown_compound,
  zero_ratios,
  missing_horizon,
  missing_feature,
  missing_parameter,
  schema,
  unknown_key,
  not_found,
  io,
  kind_mismatch,
  invalid_lever,
  no_records,
  no_facility_records,
  underdetermined,
  empty_input,
  no_feasible_assembly,
  usage,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::negative_mass: return "negative_mass";
    case Errc::unknown_compound: return "unknown_compound";
    case Errc::zero_ratios: return "zero_ratios";
    case Errc::missing_horizon: return "missing_horizon";
    case Errc::missing_feature: return "missing_feature";
    case Errc::missing_parameter: return "missing_parameter";
    case Errc::schema: return "schema";
    case Errc::unknown_key: return "unknown_key";
    case Errc::not_found: return "not_found";
    case Errc::io: return "io";
    case Errc::kind_mismatch: return "kind_mismatch";
    case Errc::invalid_lever: return "invalid_lever";
    case Errc::no_records: return "no_records";
    case Errc::no_facility_records: return "no_facility_records";
    case Errc::underdetermined: return "underdetermined";
    case Errc::empty_input: return "empty_input";
    case Errc::no_feasible_assembly: return "no_feasible_assembly";
    case Errc::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string field = {})
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        code_(code),
        field_(std::move(field)) {}

  Errc code() const noexcept { return code_; }
  /// Dotted path of the offending input field, empty when not applicable.
  const std::string& field() const noexcept { return field_; }

  /// Same error with `prefix` prepended to the field path.
  Error within(std::string_view prefix) const {
    std::string msg = what();
    if (!field_.empty()) msg = msg.substr(field_.size() + 2);
    std::string path(prefix);
    if (!field_.empty()) path += "." + field_;
    return Error(code_, std::move(msg), std::move(path));
  }

 private:
  Errc code_;
  std::string field_;
};

/// Input-document problems (bad JSON, unknown keys, wrong types).
inline bool is_schema_error(Errc c) { return c == Errc::schema || c == Errc::unknown_key; }

}  // namespace fmn

#endif  // FMN_ERROR_HPP
