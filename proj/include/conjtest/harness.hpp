#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "conjtest/core.hpp"

namespace conjtest {

using Json = nlohmann::json;

/// Thrown when an experiment spec does not validate; carries every problem.
class SpecError : public Error {
public:
    explicit SpecError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// One directed measurement. Parameters a method does not read are empty;
/// `value` is empty when the method could not be evaluated (e.g. FNN with no
/// admissible pairs).
struct ResultRow {
    std::string experiment;
    std::string pair;
    std::string method;
    std::optional<double> r;
    std::optional<std::size_t> k;
    std::optional<std::size_t> t;
    std::string direction;  // "ab" or "ba"
    std::optional<double> value;
    std::string axis;                 // sweeps only
    std::optional<double> axis_value; // sweeps only
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<std::string> warnings;  // evaluation errors behind empty values
};

/// Names of the shipped specs: 1A 1B 1C 2A 3A 3B 4A 4B 4C 5A.
std::vector<std::string> builtin_ids();
/// The shipped spec with the given id; throws Error for unknown ids.
Json builtin_spec(const std::string& id);

/// Every problem found in `spec`; empty when it is valid.
std::vector<std::string> validate_spec(const Json& spec);

/// Builds all series, runs every (comparison, method, grid point) in both
/// directions and returns rows in declaration order. `jobs` > 1 evaluates
/// independent comparisons concurrently without changing the row order.
ExperimentResult run_experiment(const Json& spec, unsigned jobs = 1);

/// Runs the spec once per value of `axis`. The axis is `r`, `k`, `t`, or
/// `series.<name>.<field>` for a generator or derive field (system parameter,
/// noise eps, embedding dim, ...). For r/k/t only methods reading that
/// parameter are run.
ExperimentResult sweep(const Json& spec, const std::string& axis, const std::vector<double>& values,
                       unsigned jobs = 1);

/// The spec's own default sweep axis and values, if it declares one.
std::optional<std::pair<std::string, std::vector<double>>> default_sweep(const Json& spec);

/// CSV with columns experiment,pair,method,r,k,t,direction,value; sweeps
/// get leading axis,axis_value columns. Empty values are written as NA.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool sweep_columns);

/// Minimal line plot of one method's sweep: one polyline per pair and
/// direction, value against axis value.
std::string sweep_svg(const std::vector<ResultRow>& rows, const std::string& method,
                      const std::string& title);

}  // namespace conjtest
