#pragma once

// Run configuration: one or more risk cells plus evaluation settings, read
// from JSON. Semantic errors carry the line of the offending field.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "levyrisk/levyrisk.hpp"

namespace levyrisk::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct CellConfig {
    std::string name;
    FrequencyModel frequency;
    LevyParams severity;
    TruncationOptions truncation;

    CompoundModel model() const { return CompoundModel(frequency, severity, truncation); }
};

struct LinearGrid {
    double from = 1.0;
    double to = 200.0;
    long long count = 200;
};

struct StudyConfig {
    std::string kind = "mse";
    std::vector<long long> caps;
    long long reference_cap = 1000;
};

struct RunConfig {
    std::vector<CellConfig> cells;
    std::variant<LinearGrid, std::vector<double>> grid = LinearGrid{};
    std::vector<double> quantiles{0.9, 0.99, 0.995, 0.999};
    long long years = 200'000;
    long long block_size = 50'000;
    std::uint64_t seed = 1;
    StudyConfig study;
    long long budget = AggregateModel::kDefaultBudget;

    std::vector<double> grid_points() const {
        if (const auto* g = std::get_if<LinearGrid>(&grid)) {
            return linear_grid(g->from, g->to, static_cast<std::size_t>(g->count));
        }
        return std::get<std::vector<double>>(grid);
    }

    SimulationConfig simulation(unsigned threads) const {
        SimulationConfig s;
        s.years = years;
        s.block_size = block_size;
        s.seed = seed;
        s.grid = grid_points();
        s.threads = threads;
        return s;
    }
};

namespace detail {

struct LineCounter {
    int line = 1;
    int token_line = 1;
};

// Character iterator that counts lines as the parser consumes input.
class CountingIterator {
public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    CountingIterator() = default;
    CountingIterator(const char* p, LineCounter* c) : p_(p), c_(c) {}

    reference operator*() const { return *p_; }
    CountingIterator& operator++() {
        const char ch = *p_;
        if (ch != ' ' && ch != '\t' && ch != '\r' && ch != '\n') c_->token_line = c_->line;
        if (ch == '\n') ++c_->line;
        ++p_;
        return *this;
    }
    CountingIterator operator++(int) {
        auto t = *this;
        ++*this;
        return t;
    }
    friend bool operator==(const CountingIterator& a, const CountingIterator& b) { return a.p_ == b.p_; }

private:
    const char* p_ = nullptr;
    LineCounter* c_ = nullptr;
};

struct Frame {
    bool array = false;
    std::string key;
    long long index = 0;
};

inline std::string pointer_of(const std::vector<Frame>& frames, std::size_t depth) {
    std::string p;
    for (std::size_t i = 0; i < depth; ++i) {
        p += '/';
        p += frames[i].array ? std::to_string(frames[i].index) : frames[i].key;
    }
    return p;
}

}  // namespace detail

/// JSON document with the source line of every value, keyed by JSON pointer.
struct LocatedJson {
    nlohmann::json doc;
    std::map<std::string, int> lines;
    std::string source;

    int line_of(std::string pointer) const {
        for (;;) {
            if (const auto it = lines.find(pointer); it != lines.end()) return it->second;
            const auto cut = pointer.rfind('/');
            if (cut == std::string::npos || pointer.empty()) return 1;
            pointer.erase(cut);
        }
    }

    [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
        throw ConfigError(source, line_of(pointer), (pointer.empty() ? std::string("/") : pointer) + ": " + what);
    }
};

inline LocatedJson parse_located(const std::string& text, const std::string& source) {
    LocatedJson out;
    out.source = source;
    detail::LineCounter counter;
    std::vector<detail::Frame> frames;

    auto record_element = [&] {
        if (!frames.empty() && frames.back().array) out.lines[detail::pointer_of(frames, frames.size())] = counter.token_line;
    };
    auto finish_element = [&] {
        if (!frames.empty() && frames.back().array) ++frames.back().index;
    };

    nlohmann::json::parser_callback_t cb = [&](int, nlohmann::json::parse_event_t ev, nlohmann::json& parsed) {
        using E = nlohmann::json::parse_event_t;
        switch (ev) {
            case E::object_start:
            case E::array_start:
                record_element();
                frames.push_back({ev == E::array_start, {}, 0});
                break;
            case E::key:
                frames.back().key = parsed.get<std::string>();
                out.lines[detail::pointer_of(frames, frames.size())] = counter.token_line;
                break;
            case E::object_end:
            case E::array_end:
                frames.pop_back();
                finish_element();
                break;
            case E::value:
                record_element();
                finish_element();
                break;
        }
        return true;
    };

    const detail::CountingIterator first(text.data(), &counter);
    const detail::CountingIterator last(text.data() + text.size(), &counter);
    try {
        out.doc = nlohmann::json::parse(first, last, cb);
    } catch (const nlohmann::json::parse_error&) {
        throw ConfigError(source, counter.line, "malformed JSON");
    }
    return out;
}

namespace detail {

class Reader {
public:
    explicit Reader(const LocatedJson& j) : j_(j) {}

    const nlohmann::json& at(const std::string& ptr) const { return j_.doc.at(nlohmann::json::json_pointer(ptr)); }
    bool has(const std::string& ptr) const { return j_.doc.contains(nlohmann::json::json_pointer(ptr)); }

    void expect_object(const std::string& ptr, std::initializer_list<const char*> allowed) const {
        const auto& v = at(ptr);
        if (!v.is_object()) j_.fail(ptr, "expected an object");
        for (const auto& [k, _] : v.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) j_.fail(ptr + "/" + k, "unknown field \"" + k + "\"");
        }
    }

    double number(const std::string& ptr) const {
        if (!has(ptr)) j_.fail(ptr, "missing required field");
        const auto& v = at(ptr);
        if (!v.is_number()) j_.fail(ptr, "expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& ptr, double fallback) const { return has(ptr) ? number(ptr) : fallback; }

    long long integer(const std::string& ptr) const {
        if (!has(ptr)) j_.fail(ptr, "missing required field");
        const auto& v = at(ptr);
        if (!v.is_number_integer()) j_.fail(ptr, "expected an integer");
        return v.get<long long>();
    }

    long long integer_or(const std::string& ptr, long long fallback) const { return has(ptr) ? integer(ptr) : fallback; }

    std::string string(const std::string& ptr) const {
        if (!has(ptr)) j_.fail(ptr, "missing required field");
        const auto& v = at(ptr);
        if (!v.is_string()) j_.fail(ptr, "expected a string");
        return v.get<std::string>();
    }

    [[noreturn]] void fail(const std::string& ptr, const std::string& what) const { j_.fail(ptr, what); }

private:
    const LocatedJson& j_;
};

inline FrequencyModel read_frequency(const Reader& r, const std::string& p) {
    const std::string kind = r.string(p + "/kind");
    FrequencyModel f;
    std::string field;  // field most likely at fault if validation fails
    if (kind == "binomial") {
        r.expect_object(p, {"kind", "trials", "p"});
        f = Binomial{r.integer(p + "/trials"), r.number(p + "/p")};
    } else if (kind == "beta_binomial") {
        r.expect_object(p, {"kind", "trials", "beta_a", "beta_b"});
        f = BetaBinomial{r.integer(p + "/trials"), r.number(p + "/beta_a"), r.number(p + "/beta_b")};
    } else if (kind == "negative_binomial") {
        r.expect_object(p, {"kind", "r", "p"});
        f = NegBinomial{r.integer(p + "/r"), r.number(p + "/p")};
    } else if (kind == "beta_negative_binomial") {
        r.expect_object(p, {"kind", "r", "beta_a", "beta_b"});
        f = BetaNegBinomial{r.integer(p + "/r"), r.number(p + "/beta_a"), r.number(p + "/beta_b")};
    } else if (kind == "poisson") {
        r.expect_object(p, {"kind", "lambda"});
        f = Poisson{r.number(p + "/lambda")};
    } else if (kind == "poisson_gamma") {
        r.expect_object(p, {"kind", "gamma_shape", "gamma_rate"});
        f = PoissonGamma{r.number(p + "/gamma_shape"), r.number(p + "/gamma_rate")};
    } else {
        r.fail(p + "/kind", "unknown frequency kind \"" + kind + "\"");
    }
    try {
        validate(f);
    } catch (const std::invalid_argument& e) {
        // Point at the first field named in the message.
        const std::string msg = e.what();
        std::string at = p;
        for (const char* k : {"trials", "p", "r", "lambda", "gamma_shape", "gamma_rate"}) {
            if (r.has(p + "/" + k) && msg.find(std::string(" ") + k + " ") != std::string::npos) {
                at = p + "/" + k;
                break;
            }
        }
        if (at == p && msg.find("Beta") != std::string::npos) at = p + "/beta_a";
        if (at == p && msg.find("shape") != std::string::npos) at = p + "/gamma_shape";
        r.fail(at, msg);
    }
    return f;
}

inline CellConfig read_cell(const Reader& r, const std::string& p, std::size_t index) {
    r.expect_object(p, {"name", "frequency", "severity", "truncation"});
    CellConfig c;
    c.name = r.has(p + "/name") ? r.string(p + "/name") : "cell" + std::to_string(index);
    if (c.name.empty() || c.name.find_first_of(",=\n\r") != std::string::npos) {
        r.fail(p + "/name", "name must be nonempty and free of ',', '=' and line breaks");
    }
    if (!r.has(p + "/frequency")) r.fail(p + "/frequency", "missing required field");
    c.frequency = read_frequency(r, p + "/frequency");

    if (!r.has(p + "/severity")) r.fail(p + "/severity", "missing required field");
    r.expect_object(p + "/severity", {"gamma", "delta"});
    c.severity.gamma = r.number(p + "/severity/gamma");
    c.severity.delta = r.number_or(p + "/severity/delta", 0.0);
    if (!(c.severity.gamma > 0.0) || !std::isfinite(c.severity.gamma)) {
        r.fail(p + "/severity/gamma", "severity gamma must be positive");
    }
    if (!std::isfinite(c.severity.delta)) r.fail(p + "/severity/delta", "severity delta must be finite");

    if (r.has(p + "/truncation")) {
        r.expect_object(p + "/truncation", {"threshold_log", "max_terms"});
        c.truncation.threshold_log = r.number_or(p + "/truncation/threshold_log", -37.0);
        c.truncation.max_terms = r.integer_or(p + "/truncation/max_terms", 100000);
        if (!(c.truncation.threshold_log < 0.0)) r.fail(p + "/truncation/threshold_log", "threshold_log must be negative");
        if (c.truncation.max_terms < 1) r.fail(p + "/truncation/max_terms", "max_terms must be >= 1");
    }
    return c;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>") {
    const LocatedJson j = parse_located(text, source);
    const detail::Reader r(j);
    RunConfig c;
    r.expect_object("", {"cells", "grid", "quantiles", "simulation", "study", "budget"});

    if (!r.has("/cells") || !r.at("/cells").is_array() || r.at("/cells").empty()) {
        r.fail("/cells", "expected a nonempty array of cells");
    }
    for (std::size_t i = 0; i < r.at("/cells").size(); ++i) {
        c.cells.push_back(detail::read_cell(r, "/cells/" + std::to_string(i), i));
    }

    if (r.has("/grid")) {
        const auto& g = r.at("/grid");
        if (g.is_array()) {
            std::vector<double> pts;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const std::string p = "/grid/" + std::to_string(i);
                pts.push_back(r.number(p));
                if (i && !(pts[i] > pts[i - 1])) r.fail(p, "grid must be strictly increasing");
            }
            c.grid = pts;
        } else {
            r.expect_object("/grid", {"from", "to", "count"});
            LinearGrid lg{r.number("/grid/from"), r.number("/grid/to"), r.integer("/grid/count")};
            if (lg.count < 1) r.fail("/grid/count", "count must be >= 1");
            if (lg.count > 1 && !(lg.to > lg.from)) r.fail("/grid/to", "to must exceed from");
            c.grid = lg;
        }
    }

    if (r.has("/quantiles")) {
        const auto& q = r.at("/quantiles");
        if (!q.is_array()) r.fail("/quantiles", "expected an array");
        c.quantiles.clear();
        for (std::size_t i = 0; i < q.size(); ++i) {
            const std::string p = "/quantiles/" + std::to_string(i);
            const double v = r.number(p);
            if (!(v > 0.0 && v < 1.0)) r.fail(p, "quantile must lie in (0,1)");
            c.quantiles.push_back(v);
        }
    }

    if (r.has("/simulation")) {
        r.expect_object("/simulation", {"years", "block_size", "seed"});
        c.years = r.integer_or("/simulation/years", c.years);
        c.block_size = r.integer_or("/simulation/block_size", c.block_size);
        if (r.has("/simulation/seed")) {
            const auto& s = r.at("/simulation/seed");
            if (!s.is_number_unsigned()) r.fail("/simulation/seed", "seed must be a nonnegative integer");
            c.seed = s.get<std::uint64_t>();
        }
        if (c.years < 1) r.fail("/simulation/years", "years must be positive");
        if (c.block_size < 1) r.fail("/simulation/block_size", "block_size must be positive");
        if (c.years % c.block_size != 0) r.fail("/simulation/block_size", "block_size must divide years");
    }

    if (r.has("/study")) {
        r.expect_object("/study", {"kind", "caps", "reference_cap"});
        if (r.has("/study/kind")) {
            c.study.kind = r.string("/study/kind");
            if (c.study.kind != "mse" && c.study.kind != "timing") r.fail("/study/kind", "kind must be mse or timing");
        }
        c.study.reference_cap = r.integer_or("/study/reference_cap", 1000);
        if (c.study.reference_cap < 1) r.fail("/study/reference_cap", "reference_cap must be >= 1");
        if (r.has("/study/caps")) {
            const auto& caps = r.at("/study/caps");
            if (!caps.is_array()) r.fail("/study/caps", "expected an array");
            for (std::size_t i = 0; i < caps.size(); ++i) {
                const std::string p = "/study/caps/" + std::to_string(i);
                c.study.caps.push_back(r.integer(p));
                if (c.study.caps.back() < 1) r.fail(p, "caps must be >= 1");
                if (i && !(c.study.caps[i] > c.study.caps[i - 1])) r.fail(p, "caps must be increasing");
            }
        }
    }

    if (r.has("/budget")) {
        c.budget = r.integer("/budget");
        if (c.budget < 1) r.fail("/budget", "budget must be positive");
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

inline nlohmann::ordered_json frequency_json(const FrequencyModel& f) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(f);
    std::visit(overloaded{
                   [&](const Binomial& m) { j["trials"] = m.trials, j["p"] = m.p; },
                   [&](const BetaBinomial& m) { j["trials"] = m.trials, j["beta_a"] = m.a, j["beta_b"] = m.b; },
                   [&](const NegBinomial& m) { j["r"] = m.r, j["p"] = m.p; },
                   [&](const BetaNegBinomial& m) { j["r"] = m.r, j["beta_a"] = m.a, j["beta_b"] = m.b; },
                   [&](const Poisson& m) { j["lambda"] = m.lambda; },
                   [&](const PoissonGamma& m) { j["gamma_shape"] = m.shape, j["gamma_rate"] = m.rate; },
               },
               f);
    return j;
}

/// Canonical JSON text; parse_config(serialize(c)) reproduces c.
inline std::string serialize(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& cell : c.cells) {
        nlohmann::ordered_json e;
        e["name"] = cell.name;
        e["frequency"] = frequency_json(cell.frequency);
        e["severity"] = {{"gamma", cell.severity.gamma}, {"delta", cell.severity.delta}};
        e["truncation"] = {{"threshold_log", cell.truncation.threshold_log}, {"max_terms", cell.truncation.max_terms}};
        j["cells"].push_back(e);
    }
    if (const auto* g = std::get_if<LinearGrid>(&c.grid)) {
        j["grid"] = {{"from", g->from}, {"to", g->to}, {"count", g->count}};
    } else {
        j["grid"] = std::get<std::vector<double>>(c.grid);
    }
    j["quantiles"] = c.quantiles;
    j["simulation"] = {{"years", c.years}, {"block_size", c.block_size}, {"seed", c.seed}};
    j["study"] = {{"kind", c.study.kind}, {"caps", c.study.caps}, {"reference_cap", c.study.reference_cap}};
    j["budget"] = c.budget;
    return j.dump(2) + "\n";
}

}  // namespace levyrisk::cli
