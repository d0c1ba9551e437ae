#include "latentflow/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "latentflow/csv.hpp"
#include "latentflow/error.hpp"
#include "latentflow/random.hpp"

namespace latentflow {

void ArchetypeSpec::validate() const {
    const std::size_t l = locations.size();
    if (name.empty() || l < 2) {
        throw ContractViolation("archetype needs a name and at least two locations");
    }
    if (initial.size() != l || mean_dwell_minutes.size() != l) {
        throw ContractViolation("archetype '" + name + "': per-location vectors have the wrong size");
    }
    const auto sums_to_one = [](std::span<const double> row) {
        double s = 0.0;
        for (const double v : row) {
            if (!(v >= 0.0)) return false;
            s += v;
        }
        return std::abs(s - 1.0) <= 1e-9;
    };
    if (!sums_to_one(initial)) {
        throw ContractViolation("archetype '" + name + "': initial distribution does not sum to 1");
    }
    for (std::size_t h = 0; h < 24; ++h) {
        if (transitions[h].rows() != l || transitions[h].cols() != l) {
            throw ContractViolation("archetype '" + name + "': transition matrix has the wrong shape");
        }
        for (std::size_t a = 0; a < l; ++a) {
            if (!sums_to_one(transitions[h].row(a))) {
                throw ContractViolation("archetype '" + name + "': transition row " + std::to_string(a) +
                                        " at hour " + std::to_string(h) + " does not sum to 1");
            }
        }
    }
    for (const double d : mean_dwell_minutes) {
        if (!(d > 0.0)) throw ContractViolation("archetype '" + name + "': dwell times must be positive");
    }
    const ClinicalPrior& c = clinical;
    for (const double sd : {wake_hour_sd, bed_hour_sd, c.age_sd, c.mmse_sd, c.adas_cog_sd,
                            c.hads_depression_sd, c.hads_anxiety_sd, c.drift_sd}) {
        if (!(sd >= 0.0)) throw ContractViolation("archetype '" + name + "': negative standard deviation");
    }
    if (!(sensor_interval_minutes > 0.0) || !(night_rise_probability >= 0.0 && night_rise_probability <= 1.0)) {
        throw ContractViolation("archetype '" + name + "': invalid sensor or night parameters");
    }
}

ArchetypeSpec make_archetype(std::string name, std::vector<std::string> locations,
                             const std::array<std::vector<double>, 24>& hourly_preference,
                             std::vector<double> mean_dwell_minutes) {
    ArchetypeSpec spec;
    spec.name = std::move(name);
    spec.locations = std::move(locations);
    spec.mean_dwell_minutes = std::move(mean_dwell_minutes);
    const std::size_t l = spec.locations.size();
    for (std::size_t h = 0; h < 24; ++h) {
        const auto& pref = hourly_preference[h];
        if (pref.size() != l) {
            throw ContractViolation("hourly preference has the wrong size");
        }
        spec.transitions[h] = Matrix(l, l);
        for (std::size_t a = 0; a < l; ++a) {
            double total = 0.0;
            for (std::size_t b = 0; b < l; ++b) {
                if (b != a) total += pref[b];
            }
            for (std::size_t b = 0; b < l; ++b) {
                if (b == a) continue;
                spec.transitions[h](a, b) = total > 0.0 ? pref[b] / total : 1.0 / static_cast<double>(l - 1);
            }
        }
    }
    // wake in the bedroom or bathroom when present, else uniformly
    spec.initial.assign(l, 0.0);
    for (std::size_t a = 0; a < l; ++a) {
        if (spec.locations[a] == "bedroom" || spec.locations[a] == "bathroom") spec.initial[a] = 1.0;
    }
    double total = std::accumulate(spec.initial.begin(), spec.initial.end(), 0.0);
    if (total == 0.0) {
        spec.initial.assign(l, 1.0);
        total = static_cast<double>(l);
    }
    for (double& v : spec.initial) v /= total;
    return spec;
}

namespace {

// lounge, kitchen, hallway, bedroom, bathroom, away
using Weights = std::vector<double>;

std::array<Weights, 24> schedule(const Weights& base, double meal_boost) {
    std::array<Weights, 24> out;
    for (std::size_t h = 0; h < 24; ++h) {
        out[h] = base;
        if (h == 7 || h == 8 || h == 12 || h == 17 || h == 18) out[h][1] *= meal_boost;
    }
    return out;
}

}  // namespace

ArchetypeSpec blend_archetypes(const ArchetypeSpec& a, const ArchetypeSpec& b, double w) {
    if (a.locations != b.locations) throw ContractViolation("blend_archetypes: location lists differ");
    if (!(w >= 0.0 && w <= 1.0)) throw ContractViolation("blend_archetypes: weight must lie in [0, 1]");
    const auto mix = [w](double x, double y) { return (1.0 - w) * x + w * y; };
    ArchetypeSpec out = a;
    for (std::size_t i = 0; i < out.initial.size(); ++i) out.initial[i] = mix(a.initial[i], b.initial[i]);
    for (std::size_t h = 0; h < 24; ++h) {
        for (std::size_t i = 0; i < out.locations.size(); ++i) {
            for (std::size_t j = 0; j < out.locations.size(); ++j) {
                out.transitions[h](i, j) = mix(a.transitions[h](i, j), b.transitions[h](i, j));
            }
        }
    }
    for (std::size_t i = 0; i < out.mean_dwell_minutes.size(); ++i) {
        out.mean_dwell_minutes[i] = mix(a.mean_dwell_minutes[i], b.mean_dwell_minutes[i]);
    }
    out.sensor_interval_minutes = mix(a.sensor_interval_minutes, b.sensor_interval_minutes);
    out.wake_hour_mean = mix(a.wake_hour_mean, b.wake_hour_mean);
    out.wake_hour_sd = mix(a.wake_hour_sd, b.wake_hour_sd);
    out.bed_hour_mean = mix(a.bed_hour_mean, b.bed_hour_mean);
    out.bed_hour_sd = mix(a.bed_hour_sd, b.bed_hour_sd);
    out.night_rise_probability = mix(a.night_rise_probability, b.night_rise_probability);
    return out;
}

std::vector<ArchetypeSpec> reference_archetypes() {
    const std::vector<std::string> rooms = {"lounge", "kitchen", "hallway", "bedroom", "bathroom", "away"};
    std::vector<ArchetypeSpec> out;

    auto early = make_archetype("kitchen_early_riser", rooms,
                                schedule({0.10, 0.70, 0.08, 0.04, 0.08, 0.0}, 2.0),
                                {15, 45, 3, 10, 6, 60});
    early.wake_hour_mean = 5.5;
    early.wake_hour_sd = 0.3;
    early.bed_hour_mean = 20.5;
    early.bed_hour_sd = 0.3;
    early.night_rise_probability = 0.02;
    early.clinical = {80, 5, 24, 2.5, 24, 5, 5, 2, 5, 2, -1.0, 2.0, 0.8, 0.7};
    out.push_back(std::move(early));

    auto lounge = make_archetype("lounge_sitter", rooms,
                                 schedule({0.72, 0.10, 0.08, 0.02, 0.08, 0.0}, 1.5),
                                 {60, 10, 3, 10, 6, 60});
    lounge.wake_hour_mean = 9.0;
    lounge.bed_hour_mean = 23.5;
    lounge.bed_hour_sd = 0.3;
    lounge.wake_hour_sd = 0.3;
    lounge.night_rise_probability = 0.03;
    lounge.clinical = {84, 5, 19, 3, 36, 6, 8, 2, 7, 2, -2.0, 3.5, 1.0, 0.4};
    out.push_back(std::move(lounge));

    auto restless = make_archetype("restless_bedroom", rooms,
                                   schedule({0.06, 0.08, 0.16, 0.50, 0.20, 0.0}, 1.2),
                                   {5, 8, 4, 40, 10, 60});
    restless.wake_hour_mean = 7.0;
    restless.bed_hour_mean = 21.5;
    restless.night_rise_probability = 0.45;
    restless.sensor_interval_minutes = 8.0;
    restless.clinical = {86, 4, 14, 3, 52, 7, 10, 2, 11, 2, -3.0, 5.0, 1.2, 0.3};
    out.push_back(std::move(restless));

    auto owl = make_archetype("night_owl", rooms,
                              schedule({0.20, 0.15, 0.35, 0.05, 0.25, 0.0}, 1.0),
                              {12, 8, 10, 8, 12, 60});
    owl.wake_hour_mean = 11.0;
    owl.bed_hour_mean = 26.0;
    owl.bed_hour_sd = 0.4;
    owl.wake_hour_sd = 0.4;
    owl.night_rise_probability = 0.05;
    owl.clinical = {76, 6, 18, 3, 42, 6, 7, 2, 9, 2, -2.5, 4.0, 1.0, 0.5};
    out.push_back(std::move(owl));

    auto away = make_archetype("often_away", rooms,
                               schedule({0.15, 0.15, 0.10, 0.05, 0.05, 0.50}, 1.3),
                               {20, 15, 3, 10, 6, 150});
    away.wake_hour_mean = 7.5;
    away.bed_hour_mean = 22.5;
    away.wake_hour_sd = 0.3;
    away.bed_hour_sd = 0.3;
    away.night_rise_probability = 0.02;
    away.clinical = {72, 5, 26, 2, 20, 5, 4, 2, 4, 2, -0.5, 1.0, 0.6, 0.8};
    out.push_back(std::move(away));

    for (const auto& a : out) a.validate();
    return out;
}

namespace {

std::size_t sample_index(Rng& rng, std::span<const double> weights) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    // rounding: fall back to the last index with weight
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) return i;
    }
    return 0;
}

class DaySimulator {
public:
    DaySimulator(const ArchetypeSpec& spec, Rng& rng, const std::string& participant, Date date,
                 std::vector<EventRecord>& out)
        : spec_(spec), rng_(rng), participant_(participant), day_start_(Timestamp{date}), out_(out) {}

    void run() {
        const double wake = std::clamp(rng_.normal(spec_.wake_hour_mean, spec_.wake_hour_sd), 0.5, 23.0);
        const double bed = std::clamp(rng_.normal(spec_.bed_hour_mean, spec_.bed_hour_sd), wake + 1.0, wake + 23.0);
        if (bed <= 24.0) {
            asleep(0.0, wake);
            awake(wake, bed, true);
            asleep(bed, 24.0);
        } else {
            awake(0.0, bed - 24.0, false);
            asleep(bed - 24.0, wake);
            awake(wake, 24.0, true);
        }
    }

private:
    void emit(double hour, EventKind kind, std::string location = {}) {
        const auto sec = std::clamp(static_cast<long>(std::floor(hour * 3600.0)), 0L, 86399L);
        out_.push_back({participant_, day_start_ + std::chrono::seconds{sec}, kind, std::move(location)});
    }

    std::size_t find_room(std::string_view name) const {
        const auto it = std::find(spec_.locations.begin(), spec_.locations.end(), name);
        return it == spec_.locations.end() ? spec_.locations.size() : static_cast<std::size_t>(it - spec_.locations.begin());
    }

    void asleep(double from, double to) {
        if (to <= from) return;
        if (from > 0.0) emit(from, EventKind::bed_enter);
        const std::size_t bathroom = find_room("bathroom");
        const std::size_t hallway = find_room("hallway");
        for (double h = std::floor(from); h < to; h += 1.0) {
            if (!rng_.bernoulli(spec_.night_rise_probability)) continue;
            const double t = std::max(from, h) + rng_.uniform() * (std::min(to, h + 1.0) - std::max(from, h)) * 0.8;
            emit(t, EventKind::bed_leave);
            double at = t + 1.0 / 60.0;
            if (hallway < spec_.locations.size()) {
                emit(at, EventKind::location_entry, spec_.locations[hallway]);
                at += 1.0 / 60.0;
            }
            if (bathroom < spec_.locations.size()) {
                emit(at, EventKind::location_entry, spec_.locations[bathroom]);
                at += (2.0 + 6.0 * rng_.uniform()) / 60.0;
                emit(std::min(at, 23.999), EventKind::location_entry, spec_.locations[bathroom]);
                at += 1.0 / 60.0;
            }
            if (at < to) emit(at, EventKind::bed_enter);
        }
        if (to < 24.0) emit(to, EventKind::bed_leave);
    }

    void awake(double from, double to, bool waking) {
        if (to <= from) return;
        std::size_t room = sample_index(rng_, spec_.initial);
        if (!waking) {
            const auto hour = static_cast<std::size_t>(from) % 24;
            room = sample_index(rng_, spec_.transitions[hour].row(room));
        }
        double t = from;
        while (t < to) {
            const double dwell = std::max(1.0, rng_.exponential(spec_.mean_dwell_minutes[room])) / 60.0;
            const double end = std::min(t + dwell, to);
            if (spec_.locations[room] != kAwayLocation) {
                emit(t, EventKind::location_entry, spec_.locations[room]);
                for (double r = t + rng_.exponential(spec_.sensor_interval_minutes) / 60.0; r < end;
                     r += rng_.exponential(spec_.sensor_interval_minutes) / 60.0) {
                    emit(r, EventKind::location_entry, spec_.locations[room]);
                }
            }
            const auto hour = static_cast<std::size_t>(std::floor(end)) % 24;
            room = sample_index(rng_, spec_.transitions[hour].row(room));
            t = end;
        }
    }

    const ArchetypeSpec& spec_;
    Rng& rng_;
    const std::string& participant_;
    Timestamp day_start_;
    std::vector<EventRecord>& out_;
};

double clamp_round(double v, double lo, double hi, double step) {
    return std::clamp(std::round(v / step) * step, lo, hi);
}

ParticipantProfile draw_profile(const std::string& id, const ClinicalPrior& c, Rng& rng, Date assessment) {
    ParticipantProfile p;
    p.participant_id = id;
    p.age = clamp_round(rng.normal(c.age_mean, c.age_sd), 50.0, 105.0, 1.0);
    p.lives_alone = rng.bernoulli(c.lives_alone_probability);
    p.mmse = clamp_round(rng.normal(c.mmse_mean, c.mmse_sd), 0.0, 30.0, 1.0);
    p.adas_cog = clamp_round(rng.normal(c.adas_cog_mean, c.adas_cog_sd), 0.0, 70.0, 0.5);
    p.hads_depression = clamp_round(rng.normal(c.hads_depression_mean, c.hads_depression_sd), 0.0, 21.0, 1.0);
    p.hads_anxiety = clamp_round(rng.normal(c.hads_anxiety_mean, c.hads_anxiety_sd), 0.0, 21.0, 1.0);
    const long gap = 365 + std::lround(rng.normal(0.0, 20.0));
    p.assessment_date = assessment;
    p.prior_assessment_date = assessment - std::chrono::days{std::max(200L, gap)};
    const double years = static_cast<double>(days_between(*p.prior_assessment_date, assessment)) / 365.25;
    const double mmse_drift = rng.normal(c.mmse_drift_mean, c.drift_sd);
    const double adas_drift = rng.normal(c.adas_cog_drift_mean, c.drift_sd);
    p.mmse_prior = clamp_round(*p.mmse - mmse_drift * years, 0.0, 30.0, 1.0);
    p.adas_cog_prior = clamp_round(*p.adas_cog - adas_drift * years, 0.0, 70.0, 0.5);
    return p;
}

}  // namespace

SyntheticCohort generate_cohort(std::span<const ArchetypeSpec> archetypes, const GenerateOptions& options) {
    if (archetypes.empty()) {
        throw ContractViolation("generate_cohort needs at least one archetype");
    }
    if (options.days < 1) {
        throw ContractViolation("generate_cohort needs at least one day");
    }
    if (!(options.max_secondary_share >= 0.0 && options.max_secondary_share <= 1.0)) {
        throw ContractViolation("max_secondary_share must lie in [0, 1]");
    }
    for (const auto& a : archetypes) a.validate();

    const std::size_t total = archetypes.size() * options.participants_per_archetype;
    const int width = std::max<int>(3, static_cast<int>(std::to_string(total).size()));
    const Date last_day = options.start_date + std::chrono::days{static_cast<long>(options.days) - 1};

    SyntheticCohort result;
    std::vector<EventRecord> events;
    std::map<std::string, ParticipantProfile> profiles;
    for (std::size_t i = 0; i < total; ++i) {
        std::string id = std::to_string(i + 1);
        id = "p" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(id.size(), width), '0') + id;
        const std::size_t primary = i % archetypes.size();
        const ArchetypeSpec& spec = archetypes[primary];
        Rng rng(derive_seed(options.seed, i));
        std::size_t secondary = primary;
        double share = 0.0;
        if (archetypes.size() > 1 && options.max_secondary_share > 0.0) {
            secondary = (primary + 1 + rng.index(archetypes.size() - 1)) % archetypes.size();
            share = rng.uniform() * options.max_secondary_share;
        }
        for (std::size_t d = 0; d < options.days; ++d) {
            const Date date = options.start_date + std::chrono::days{static_cast<long>(d)};
            const std::size_t before = events.size();
            if (rng.bernoulli(share)) {
                const ArchetypeSpec today = blend_archetypes(spec, archetypes[secondary], rng.uniform());
                DaySimulator(today, rng, id, date, events).run();
            } else {
                DaySimulator(spec, rng, id, date, events).run();
            }
            if (events.size() == before) {
                // guarantee at least one event per simulated day
                events.push_back({id, Timestamp{date} + std::chrono::hours{12}, EventKind::location_entry,
                                  spec.locations.front() == kAwayLocation ? spec.locations.back() : spec.locations.front()});
            }
        }
        profiles.emplace(id, draw_profile(id, spec.clinical, rng, last_day));
        result.ground_truth.emplace(id, spec.name);
    }
    result.cohort = Cohort::assemble(std::move(events), std::move(profiles), std::chrono::minutes{0},
                                     std::make_pair(options.start_date, last_day));
    return result;
}

GenerateOptions separation_fixture(std::uint64_t seed) {
    GenerateOptions o;
    o.participants_per_archetype = 4;
    o.days = 60;
    o.seed = seed;
    o.max_secondary_share = 0.3;
    return o;
}

std::vector<EventRecord> flatten_events(const Cohort& cohort) {
    std::vector<EventRecord> out;
    for (const auto& [_, events] : cohort.events) {
        out.insert(out.end(), events.begin(), events.end());
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

void write_ground_truth(std::ostream& out, const std::map<std::string, std::string>& truth) {
    out << "participant_id,archetype\n";
    for (const auto& [id, name] : truth) out << csv::escape(id) << ',' << csv::escape(name) << '\n';
}

std::map<std::string, std::string> read_ground_truth(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        if (cells.size() != 2) throw DataError("ground truth rows need 2 columns");
        out.emplace(cells[0], cells[1]);
    }
    return out;
}

}  // namespace latentflow
