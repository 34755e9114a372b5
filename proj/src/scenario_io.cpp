#include "binspec/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "binspec/errors.hpp"

namespace binspec {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Located {
    std::string value;
    int line = 0;
};

class Parser {
public:
    explicit Parser(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(int line, const std::string& what) const {
        std::ostringstream msg;
        msg << source_ << ':' << line << ": " << what;
        throw ValidationError(msg.str());
    }

    [[noreturn]] void fail_missing(const std::string& key) const {
        throw ValidationError(source_ + ": missing required field '" + key + "'");
    }

    double number(std::string_view text, int line, const std::string& key) const {
        text = trim(text);
        const auto slash = text.find('/');
        if (slash != std::string_view::npos) {
            const double num = number(text.substr(0, slash), line, key);
            const double den = number(text.substr(slash + 1), line, key);
            if (den == 0.0) fail(line, key + ": zero denominator");
            return num / den;
        }
        double v = 0.0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (text.empty() || ec != std::errc() || ptr != end)
            fail(line, key + ": cannot parse number '" + std::string(text) + "'");
        return v;
    }

    std::size_t count(const Located& v, const std::string& key) const {
        const double x = number(v.value, v.line, key);
        if (x < 0 || x != static_cast<double>(static_cast<std::size_t>(x)))
            fail(v.line, key + ": expected a non-negative integer");
        return static_cast<std::size_t>(x);
    }

    std::vector<double> list(const Located& v, const std::string& key) const {
        std::vector<double> out;
        std::string_view rest = v.value;
        while (true) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            if (item.empty()) fail(v.line, key + ": empty list entry");
            out.push_back(number(item, v.line, key));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
    static const std::vector<std::string> known = {"D", "M", "sampler_ratio", "omega_bar",
                                                   "bandwidth_bar"};
    Parser p(source);
    std::map<std::string, Located> fields;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos)
            text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) p.fail(line, "expected 'key = value'");
        const std::string key(trim(text.substr(0, eq)));
        const std::string value(trim(text.substr(eq + 1)));
        if (std::find(known.begin(), known.end(), key) == known.end())
            p.fail(line, "unknown key '" + key + "'");
        if (fields.count(key)) p.fail(line, "duplicate key '" + key + "'");
        if (value.empty()) p.fail(line, key + ": missing value");
        fields[key] = {value, line};
    }

    for (const char* required : {"D", "M", "omega_bar", "bandwidth_bar"})
        if (!fields.count(required)) p.fail_missing(required);

    Scenario scn;
    const std::size_t D = p.count(fields["D"], "D");
    if (D < 1) p.fail(fields["D"].line, "D: need at least one source");
    scn.M = p.count(fields["M"], "M");
    if (fields.count("sampler_ratio"))
        scn.sampler_ratio =
            p.number(fields["sampler_ratio"].value, fields["sampler_ratio"].line, "sampler_ratio");
    scn.omega_bar = p.list(fields["omega_bar"], "omega_bar");
    scn.bandwidth_bar = p.list(fields["bandwidth_bar"], "bandwidth_bar");
    for (const char* key : {"omega_bar", "bandwidth_bar"}) {
        const auto& values = std::string_view(key) == "omega_bar" ? scn.omega_bar : scn.bandwidth_bar;
        if (values.size() != D) {
            std::ostringstream msg;
            msg << key << ": expected " << D << " values (D = " << D << "), got " << values.size();
            p.fail(fields[key].line, msg.str());
        }
    }
    try {
        scn.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(p.source() + ": " + e.what());
    }
    return scn;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file " + path.string());
    return parse_scenario(in, path.string());
}

}  // namespace binspec
