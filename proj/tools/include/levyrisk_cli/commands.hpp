#pragma once

// The subcommands. Each returns its table plus the outcome of the internal
// mass checks; rendering and exit codes are left to the caller.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levyrisk/levyrisk.hpp"
#include "levyrisk_cli/config.hpp"
#include "levyrisk_cli/table.hpp"

namespace levyrisk::cli {

inline constexpr double kMassTolerance = 1e-10;

enum class Format { Csv, Json };

struct CommandResult {
    Table table;
    std::optional<nlohmann::ordered_json> record;  // replaces the table in JSON output
    std::vector<std::string> problems;

    bool ok() const { return problems.empty(); }

    std::string render(Format f) const {
        if (f == Format::Json) return record ? record->dump(2) + "\n" : to_json(table);
        return to_csv(table);
    }
};

namespace detail {

inline const CellConfig& single_cell(const RunConfig& c, const char* command) {
    if (c.cells.size() != 1) {
        throw std::invalid_argument(std::string(command) + ": config must hold exactly one cell (found " +
                                    std::to_string(c.cells.size()) + "); use aggregate for several");
    }
    return c.cells.front();
}

inline void check_mass(const std::string& name, double dropped, CommandResult& r) {
    if (dropped > kMassTolerance) {
        r.problems.push_back(name + ": truncated mixture drops mass " + format_double(dropped) + " > " +
                             format_double(kMassTolerance));
    }
}

inline void describe(const CellConfig& cell, const CompoundModel& m, Table& t) {
    t.add_meta("cell", cell.name);
    t.add_meta("frequency", kind_name(cell.frequency));
    t.add_meta("zero_prob", m.zero_prob());
    t.add_meta("n_lower", m.bounds().n_lower);
    t.add_meta("n_mode", m.bounds().n_mode);
    t.add_meta("n_upper", m.bounds().n_upper);
    t.add_meta("mass_dropped", m.mass_dropped());
}

}  // namespace detail

inline CommandResult cmd_eval(const RunConfig& c) {
    const auto& cell = detail::single_cell(c, "eval");
    const CompoundModel m = cell.model();
    CommandResult r;
    detail::describe(cell, m, r.table);
    r.table.columns = {"z", "pdf", "cdf"};
    for (double z : c.grid_points()) r.table.rows.push_back({z, m.density(z), m.cdf(z)});
    detail::check_mass(cell.name, m.mass_dropped(), r);
    return r;
}

inline CommandResult cmd_var(const RunConfig& c) {
    const auto& cell = detail::single_cell(c, "var");
    const CompoundModel m = cell.model();
    CommandResult r;
    detail::describe(cell, m, r.table);
    r.table.columns = {"q", "var"};
    for (double q : c.quantiles) {
        double v;
        try {
            v = m.value_at_risk(q);
        } catch (const QuantileUnresolvable& e) {
            v = std::numeric_limits<double>::quiet_NaN();
            r.problems.push_back(cell.name + ": " + e.what());
        }
        r.table.rows.push_back({q, v});
    }
    detail::check_mass(cell.name, m.mass_dropped(), r);
    return r;
}

inline CommandResult cmd_truncate(const RunConfig& c) {
    CommandResult r;
    r.table.columns = {"n_lower", "n_mode", "n_upper", "threshold_log", "capped", "mass_dropped"};
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& cell : c.cells) {
        const auto b = truncation_bounds(cell.frequency, cell.severity.gamma, cell.truncation);
        const double dropped = truncated_mass(cell.frequency, b);
        r.table.add_meta("cell", cell.name);
        r.table.rows.push_back({static_cast<double>(b.n_lower), static_cast<double>(b.n_mode),
                                static_cast<double>(b.n_upper), b.threshold_log, b.capped ? 1.0 : 0.0, dropped});
        nlohmann::ordered_json j;
        j["cell"] = cell.name;
        j["frequency"] = frequency_json(cell.frequency);
        j["n_lower"] = b.n_lower;
        j["n_mode"] = b.n_mode;
        j["n_upper"] = b.n_upper;
        j["threshold_log"] = b.threshold_log;
        j["capped"] = b.capped;
        j["mass_dropped"] = dropped;
        cells.push_back(j);
        detail::check_mass(cell.name, dropped, r);
    }
    r.record = cells.size() == 1 ? cells.front() : nlohmann::ordered_json{{"cells", cells}};
    return r;
}

inline CommandResult cmd_simulate(const RunConfig& c, unsigned threads) {
    const auto& cell = detail::single_cell(c, "simulate");
    const CompoundModel m = cell.model();
    const SimulationConfig sim = c.simulation(threads);
    const auto e = empirical_cdf(simulate_years(m, sim), sim);
    CommandResult r;
    detail::describe(cell, m, r.table);
    r.table.add_meta("years", sim.years);
    r.table.add_meta("block_size", sim.block_size);
    r.table.add_meta("seed", std::to_string(sim.seed));
    r.table.columns = {"z", "closed_form", "empirical", "std_error"};
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
        r.table.rows.push_back({e.grid[i], m.cdf(e.grid[i]), e.estimate[i], e.std_error[i]});
    }
    detail::check_mass(cell.name, m.mass_dropped(), r);
    return r;
}

inline CommandResult cmd_study(const RunConfig& c, unsigned threads, const std::string& kind) {
    const auto& cell = detail::single_cell(c, "study");
    const CompoundModel m = cell.model();
    CommandResult r;
    detail::describe(cell, m, r.table);
    r.table.add_meta("study", kind);
    if (kind == "mse") {
        std::vector<long long> caps = c.study.caps;
        if (caps.empty()) {
            for (long long k = 1; k <= c.study.reference_cap; ++k) caps.push_back(k);
        }
        const auto grid = c.grid_points();
        r.table.add_meta("reference_cap", c.study.reference_cap);
        r.table.columns = {"cap", "mse"};
        for (const auto& p : truncation_study(m, caps, grid, c.study.reference_cap)) {
            r.table.rows.push_back({static_cast<double>(p.cap), p.mse});
        }
    } else if (kind == "timing") {
        const SimulationConfig sim = c.simulation(threads);
        const TimingResult t = timing_study(m, sim, c.study.reference_cap);
        r.table.add_meta("years", sim.years);
        r.table.add_meta("closed_form_cap", c.study.reference_cap);
        r.table.columns = {"closed_form_seconds", "monte_carlo_seconds", "ratio"};
        r.table.rows.push_back({t.closed_form_seconds, t.monte_carlo_seconds, t.ratio()});
    } else {
        throw std::invalid_argument("study: kind must be mse or timing");
    }
    detail::check_mass(cell.name, m.mass_dropped(), r);
    return r;
}

inline CommandResult cmd_aggregate(const RunConfig& c) {
    if (c.cells.size() < 2) throw std::invalid_argument("aggregate: config must hold at least two cells");
    std::vector<CompoundModel> cells;
    for (const auto& cell : c.cells) cells.push_back(cell.model());
    const AggregateModel a(cells, c.budget);
    CommandResult r;
    std::string names;
    for (const auto& cell : c.cells) names += (names.empty() ? "" : "+") + cell.name;
    r.table.add_meta("cells", names);
    r.table.add_meta("component_count", static_cast<long long>(a.components().size()));
    r.table.add_meta("budget", a.budget());
    r.table.add_meta("zero_prob", a.zero_prob());
    r.table.add_meta("mass_dropped", a.mass_dropped());
    for (double q : c.quantiles) {
        double v;
        try {
            v = a.value_at_risk(q);
        } catch (const QuantileUnresolvable& e) {
            v = std::numeric_limits<double>::quiet_NaN();
            r.problems.push_back(std::string("aggregate: ") + e.what());
        }
        r.table.add_meta("var_" + nlohmann::json(q).dump(), v);
    }
    r.table.columns = {"z", "pdf", "cdf"};
    for (double z : c.grid_points()) r.table.rows.push_back({z, a.density(z), a.cdf(z)});
    for (std::size_t j = 0; j < cells.size(); ++j) detail::check_mass(c.cells[j].name, cells[j].mass_dropped(), r);
    return r;
}

}  // namespace levyrisk::cli
