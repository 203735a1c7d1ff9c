#include "jumplab/model.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace jumplab {

using nlohmann::json;

// ---- SizeLaw ----

void SizeLaw::validate() const {
    switch (kind) {
        case SizeKind::PointMass:
            if (value == 0.0) throw std::invalid_argument("jump size point mass at 0 is not a jump");
            break;
        case SizeKind::TwoPoint:
            if (first == 0.0 || second == 0.0)
                throw std::invalid_argument("two-point jump law must not carry an atom at 0");
            if (!(p_first >= 0.0 && p_first <= 1.0))
                throw std::invalid_argument("two-point probability outside [0, 1]");
            break;
        case SizeKind::Uniform:
            if (!(lo < hi)) throw std::invalid_argument("uniform jump law needs lo < hi");
            break;
        case SizeKind::SignedUniform:
            if (!(0.0 < lo && lo < hi))
                throw std::invalid_argument("signed uniform magnitude range needs 0 < lo < hi");
            if (!(p_first >= 0.0 && p_first <= 1.0))
                throw std::invalid_argument("signed uniform sign probability outside [0, 1]");
            break;
        case SizeKind::Exponential:
            if (!(rate > 0.0)) throw std::invalid_argument("exponential jump law needs rate > 0");
            break;
    }
}

double SizeLaw::draw(Rng& rng) const {
    switch (kind) {
        case SizeKind::PointMass: return value;
        case SizeKind::TwoPoint: return rng.uniform01() < p_first ? first : second;
        case SizeKind::Uniform: return lo + (hi - lo) * rng.uniform01();
        case SizeKind::SignedUniform: {
            double mag = lo + (hi - lo) * rng.uniform01();
            return rng.uniform01() < p_first ? mag : -mag;
        }
        case SizeKind::Exponential: return rng.exponential(rate);
    }
    throw std::logic_error("unreachable");
}

double SizeLaw::mean() const {
    switch (kind) {
        case SizeKind::PointMass: return value;
        case SizeKind::TwoPoint: return p_first * first + (1.0 - p_first) * second;
        case SizeKind::Uniform: return 0.5 * (lo + hi);
        case SizeKind::SignedUniform: return (2.0 * p_first - 1.0) * 0.5 * (lo + hi);
        case SizeKind::Exponential: return 1.0 / rate;
    }
    throw std::logic_error("unreachable");
}

double SizeLaw::prob_positive() const {
    switch (kind) {
        case SizeKind::PointMass: return value > 0.0 ? 1.0 : 0.0;
        case SizeKind::TwoPoint:
            return (first > 0.0 ? p_first : 0.0) + (second > 0.0 ? 1.0 - p_first : 0.0);
        case SizeKind::Uniform: {
            if (lo >= 0.0) return 1.0;
            if (hi <= 0.0) return 0.0;
            return hi / (hi - lo);
        }
        case SizeKind::SignedUniform: return p_first;
        case SizeKind::Exponential: return 1.0;
    }
    throw std::logic_error("unreachable");
}

double SizeLaw::mean_given_sign(int s) const {
    switch (kind) {
        case SizeKind::PointMass:
            if ((s > 0) != (value > 0.0))
                throw std::invalid_argument("conditioning on a zero-probability sign");
            return value;
        case SizeKind::TwoPoint: {
            double w = 0.0, m = 0.0;
            if ((s > 0) == (first > 0.0)) { w += p_first; m += p_first * first; }
            if ((s > 0) == (second > 0.0)) { w += 1.0 - p_first; m += (1.0 - p_first) * second; }
            if (w == 0.0) throw std::invalid_argument("conditioning on a zero-probability sign");
            return m / w;
        }
        case SizeKind::Uniform: {
            if (lo >= 0.0 || hi <= 0.0) return 0.5 * (lo + hi);
            return s > 0 ? 0.5 * hi : 0.5 * lo;
        }
        case SizeKind::SignedUniform: return static_cast<double>(s) * 0.5 * (lo + hi);
        case SizeKind::Exponential:
            if (s < 0) throw std::invalid_argument("conditioning on a zero-probability sign");
            return 1.0 / rate;
    }
    throw std::logic_error("unreachable");
}

double SizeLaw::prob_abs_in(double a, double b) const {
    auto in = [&](double x) { return std::abs(x) >= a && std::abs(x) <= b; };
    switch (kind) {
        case SizeKind::PointMass: return in(value) ? 1.0 : 0.0;
        case SizeKind::TwoPoint:
            return (in(first) ? p_first : 0.0) + (in(second) ? 1.0 - p_first : 0.0);
        case SizeKind::Uniform: {
            // length of {x in [lo,hi] : |x| in [a,b]} over (hi - lo)
            auto seg = [&](double l, double h) {
                double x0 = std::max(l, a), x1 = std::min(h, b);
                return std::max(0.0, x1 - x0);
            };
            double len = seg(std::max(lo, 0.0), std::max(hi, 0.0));
            double nl = std::max(-hi, 0.0), nh = std::max(-lo, 0.0);
            len += seg(nl, nh);
            return len / (hi - lo);
        }
        case SizeKind::SignedUniform: {
            double x0 = std::max(lo, a), x1 = std::min(hi, b);
            return std::max(0.0, x1 - x0) / (hi - lo);
        }
        case SizeKind::Exponential:
            if (b < 0.0 || a > b) return 0.0;
            return std::exp(-rate * std::max(a, 0.0)) - std::exp(-rate * b);
    }
    throw std::logic_error("unreachable");
}

// ---- ModelSpec ----

std::vector<JumpSpec> ModelSpec::effective_jumps() const {
    std::vector<JumpSpec> all = jumps;
    if (dividend) {
        JumpSpec d;
        d.time.kind = TimeKind::Deterministic;
        d.time.at = dividend->at;
        d.size.kind = SizeKind::PointMass;
        d.size.value = (1.0 - dividend->fraction) * dividend->amount;
        d.predictability = Predictability::Full;
        d.reveal_time = 0.0;
        all.push_back(d);
    }
    return all;
}

void ModelSpec::validate(const TimeGrid& grid) const {
    if (!(initial_price > 0.0)) throw std::invalid_argument("initial price must be positive");
    if (base.kind == BaseKind::GaussianWalk && !(base.sigma_vol > 0.0))
        throw std::invalid_argument("Gaussian walk needs sigma_vol > 0");

    if (dividend) {
        if (!(dividend->fraction > 0.0 && dividend->fraction < 1.0))
            throw std::invalid_argument("dividend drop fraction must lie strictly between 0 and 1");
        if (!(dividend->amount > 0.0)) throw std::invalid_argument("dividend amount must be positive");
        auto i = grid.require_index(dividend->at, "dividend date");
        if (i == 0 || i > grid.n_steps) throw std::invalid_argument("dividend date must lie in (0, horizon]");
    }

    std::vector<std::size_t> fixed;
    for (const auto& j : effective_jumps()) {
        j.size.validate();
        switch (j.time.kind) {
            case TimeKind::Deterministic: {
                auto i = grid.require_index(j.time.at, "jump time");
                if (i == 0) throw std::invalid_argument("jump at t = 0 contradicts the no-initial-jump convention");
                fixed.push_back(i);
                break;
            }
            case TimeKind::FirstHitting:
                break;
            case TimeKind::ExponentialClock:
                if (!(j.time.rate > 0.0)) throw std::invalid_argument("clock rate must be positive");
                if (j.predictability != Predictability::None)
                    throw std::invalid_argument(
                        "a clock-timed jump cannot be announced; use predictability none");
                break;
        }
        if (j.reveal_time) {
            auto r = grid.require_index(*j.reveal_time, "reveal time");
            if (j.time.kind == TimeKind::Deterministic &&
                j.predictability != Predictability::None &&
                r >= grid.require_index(j.time.at, "jump time"))
                throw std::invalid_argument("reveal time must precede the jump for it to be informative");
        }
    }

    if (ladlag) {
        ladlag->size.validate();
        if (ladlag->size.kind == SizeKind::PointMass && ladlag->size.value == 0.0)
            throw std::invalid_argument("right jump of size 0 is not a jump");
        auto i = grid.require_index(ladlag->at, "right-jump time");
        if (i >= grid.n_steps)
            throw std::invalid_argument("right jump needs at least one grid point after it");
        fixed.push_back(i);
    }

    for (std::size_t a = 0; a < fixed.size(); ++a)
        for (std::size_t b = a + 1; b < fixed.size(); ++b)
            if (fixed[a] == fixed[b])
                throw std::invalid_argument("at most one jump per grid time");
}

// ---- JSON ----

namespace {

json size_to_json(const SizeLaw& s) {
    switch (s.kind) {
        case SizeKind::PointMass: return {{"kind", "point_mass"}, {"value", s.value}};
        case SizeKind::TwoPoint:
            return {{"kind", "two_point"}, {"first", s.first}, {"second", s.second}, {"p_first", s.p_first}};
        case SizeKind::Uniform: return {{"kind", "uniform"}, {"lo", s.lo}, {"hi", s.hi}};
        case SizeKind::SignedUniform:
            return {{"kind", "signed_uniform"}, {"p_up", s.p_first}, {"lo", s.lo}, {"hi", s.hi}};
        case SizeKind::Exponential: return {{"kind", "exponential"}, {"rate", s.rate}};
    }
    throw std::logic_error("unreachable");
}

SizeLaw size_from_json(const json& j) {
    SizeLaw s;
    std::string kind = j.at("kind");
    if (kind == "point_mass") {
        s.kind = SizeKind::PointMass;
        s.value = j.at("value");
    } else if (kind == "two_point") {
        s.kind = SizeKind::TwoPoint;
        s.first = j.at("first");
        s.second = j.at("second");
        s.p_first = j.value("p_first", 0.5);
    } else if (kind == "uniform") {
        s.kind = SizeKind::Uniform;
        s.lo = j.at("lo");
        s.hi = j.at("hi");
    } else if (kind == "signed_uniform") {
        s.kind = SizeKind::SignedUniform;
        s.p_first = j.value("p_up", 0.5);
        s.lo = j.at("lo");
        s.hi = j.at("hi");
    } else if (kind == "exponential") {
        s.kind = SizeKind::Exponential;
        s.rate = j.at("rate");
    } else {
        throw std::invalid_argument("unknown size law kind: " + kind);
    }
    return s;
}

json time_to_json(const JumpTimeSpec& t) {
    switch (t.kind) {
        case TimeKind::Deterministic: return {{"kind", "deterministic"}, {"t", t.at}};
        case TimeKind::FirstHitting: return {{"kind", "first_hitting"}, {"level", t.level}};
        case TimeKind::ExponentialClock: return {{"kind", "exponential_clock"}, {"rate", t.rate}};
    }
    throw std::logic_error("unreachable");
}

JumpTimeSpec time_from_json(const json& j) {
    JumpTimeSpec t;
    std::string kind = j.at("kind");
    if (kind == "deterministic") {
        t.kind = TimeKind::Deterministic;
        t.at = j.at("t");
    } else if (kind == "first_hitting") {
        t.kind = TimeKind::FirstHitting;
        t.level = j.at("level");
    } else if (kind == "exponential_clock") {
        t.kind = TimeKind::ExponentialClock;
        t.rate = j.at("rate");
    } else {
        throw std::invalid_argument("unknown jump time kind: " + kind);
    }
    return t;
}

std::string pred_name(Predictability p) {
    switch (p) {
        case Predictability::Full: return "full";
        case Predictability::DirectionOnly: return "direction_only";
        case Predictability::None: return "none";
    }
    throw std::logic_error("unreachable");
}

Predictability pred_from_name(const std::string& s) {
    if (s == "full") return Predictability::Full;
    if (s == "direction_only") return Predictability::DirectionOnly;
    if (s == "none") return Predictability::None;
    throw std::invalid_argument("unknown predictability class: " + s);
}

std::string base_name(BaseKind b) {
    switch (b) {
        case BaseKind::Flat: return "flat";
        case BaseKind::Linear: return "linear";
        case BaseKind::GaussianWalk: return "gaussian_walk";
    }
    throw std::logic_error("unreachable");
}

BaseKind base_from_name(const std::string& s) {
    if (s == "flat") return BaseKind::Flat;
    if (s == "linear") return BaseKind::Linear;
    if (s == "gaussian_walk") return BaseKind::GaussianWalk;
    throw std::invalid_argument("unknown base kind: " + s);
}

}  // namespace

std::string model_to_json(const ModelSpec& spec) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["initial_price"] = spec.initial_price;
    j["base"] = {{"kind", base_name(spec.base.kind)}};
    if (spec.base.kind != BaseKind::Flat) j["base"]["drift"] = spec.base.drift;
    if (spec.base.kind == BaseKind::GaussianWalk) j["base"]["sigma_vol"] = spec.base.sigma_vol;
    j["jumps"] = json::array();
    for (const auto& jp : spec.jumps) {
        json e = {{"time", time_to_json(jp.time)},
                  {"size", size_to_json(jp.size)},
                  {"predictability", pred_name(jp.predictability)}};
        if (jp.reveal_time) e["reveal_time"] = *jp.reveal_time;
        j["jumps"].push_back(e);
    }
    if (spec.dividend)
        j["dividend"] = {{"amount", spec.dividend->amount},
                         {"fraction", spec.dividend->fraction},
                         {"t", spec.dividend->at}};
    if (spec.ladlag)
        j["ladlag"] = {{"t", spec.ladlag->at}, {"size", size_to_json(spec.ladlag->size)}};
    return j.dump(2);
}

ModelSpec model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model JSON does not parse: ") + e.what());
    }
    int v = j.value("schema_version", -1);
    if (v != kSchemaVersion)
        throw std::invalid_argument("unsupported model schema_version " + std::to_string(v));
    ModelSpec spec;
    spec.initial_price = j.value("initial_price", 1.0);
    if (j.contains("base")) {
        spec.base.kind = base_from_name(j["base"].at("kind"));
        spec.base.drift = j["base"].value("drift", 0.0);
        spec.base.sigma_vol = j["base"].value("sigma_vol", 0.0);
    }
    for (const auto& e : j.value("jumps", json::array())) {
        JumpSpec jp;
        jp.time = time_from_json(e.at("time"));
        jp.size = size_from_json(e.at("size"));
        jp.predictability = pred_from_name(e.at("predictability"));
        if (e.contains("reveal_time")) jp.reveal_time = e["reveal_time"].get<double>();
        spec.jumps.push_back(jp);
    }
    if (j.contains("dividend")) {
        DividendSpec d;
        d.amount = j["dividend"].at("amount");
        d.fraction = j["dividend"].at("fraction");
        d.at = j["dividend"].at("t");
        spec.dividend = d;
    }
    if (j.contains("ladlag")) {
        LadlagSpec l;
        l.at = j["ladlag"].at("t");
        l.size = size_from_json(j["ladlag"].at("size"));
        spec.ladlag = l;
    }
    return spec;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string model_hash(const ModelSpec& spec) { return fnv1a_hex(model_to_json(spec)); }

}  // namespace jumplab
