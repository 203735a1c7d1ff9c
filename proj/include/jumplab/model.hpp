#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumplab/rng.hpp"
#include "jumplab/time_grid.hpp"

namespace jumplab {

inline constexpr int kSchemaVersion = 1;

// ---- jump size laws ----

enum class SizeKind { PointMass, TwoPoint, Uniform, SignedUniform, Exponential };

// Distribution of a single jump size.  Atoms at zero are rejected: a declared
// jump must move the price, occurrence randomness belongs to the time spec.
struct SizeLaw {
    SizeKind kind = SizeKind::PointMass;
    double value = 0.0;       // PointMass
    double first = 0.0;       // TwoPoint atoms
    double second = 0.0;
    double p_first = 0.5;     // P(first); SignedUniform reuses it as P(sign +)
    double lo = 0.0, hi = 0.0;  // Uniform / SignedUniform magnitude range
    double rate = 1.0;        // Exponential

    void validate() const;
    double draw(Rng& rng) const;
    double mean() const;
    double prob_positive() const;
    // E[size | sign(size) = s], s = +1 or -1; only meaningful when that sign
    // has positive probability.
    double mean_given_sign(int s) const;
    // P(|size| in [a, b])
    double prob_abs_in(double a, double b) const;
};

// ---- jump timing ----

enum class TimeKind { Deterministic, FirstHitting, ExponentialClock };

struct JumpTimeSpec {
    TimeKind kind = TimeKind::Deterministic;
    double at = 0.5;      // Deterministic
    double level = 0.0;   // FirstHitting: first grid time the continuous part crosses the level
    double rate = 1.0;    // ExponentialClock: first grid time after an Exp(rate) alarm
};

// What the information view learns about the jump before it happens.
// Full:          realized size enters the view at reveal time (default t = 0).
// DirectionOnly: realized sign enters at reveal time, size only at the jump.
// None:          nothing before the jump.
enum class Predictability { Full, DirectionOnly, None };

struct JumpSpec {
    JumpTimeSpec time;
    SizeLaw size;
    Predictability predictability = Predictability::None;
    std::optional<double> reveal_time;  // default: 0 for Full/DirectionOnly, jump time for None
};

// Escrowed dividend: the ex-dividend price drops by fraction `fraction` of the
// dividend at the payment date while the cumulated-dividend account gains the
// full amount, so the gains process jumps up by (1 - fraction) * amount.
struct DividendSpec {
    double amount = 1.0;
    double fraction = 0.5;  // in (0, 1)
    double at = 0.5;
};

// Right jump at a known time: the price is still at its old level AT the jump
// time and moves just after it, with the realized size entering the view at
// the jump time itself.
struct LadlagSpec {
    double at = 0.5;
    SizeLaw size;
};

// ---- base (continuous) part ----

enum class BaseKind { Flat, Linear, GaussianWalk };

struct BaseSpec {
    BaseKind kind = BaseKind::Flat;
    double drift = 0.0;      // per unit time (Linear, GaussianWalk)
    double sigma_vol = 0.0;  // per unit time (GaussianWalk)
};

// ---- full model ----

struct ModelSpec {
    double initial_price = 1.0;
    BaseSpec base;
    std::vector<JumpSpec> jumps;
    std::optional<DividendSpec> dividend;
    std::optional<LadlagSpec> ladlag;

    // Jumps as the rest of the laboratory sees them: the declared jumps plus,
    // if present, the dividend rendered as a deterministic fully-revealed jump
    // of size (1 - fraction) * amount.  Index into this vector is the stable
    // jump id used by strategies and conditional statistics.
    std::vector<JumpSpec> effective_jumps() const;

    void validate(const TimeGrid& grid) const;
};

// JSON wire format (schema_version stamped on write, checked on read).
std::string model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const std::string& text);

// FNV-1a hash of the canonical JSON serialization; embedded in every output
// file so results can be traced back to the exact configuration.
std::string fnv1a_hex(const std::string& text);
std::string model_hash(const ModelSpec& spec);

}  // namespace jumplab
