#include "latentflow/triplets.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "latentflow/random.hpp"

namespace latentflow {

OneHotEncoding one_hot_encode(std::span<const DayString> days) {
    OneHotEncoding enc;
    std::set<std::string> seen;
    for (const auto& d : days) {
        if (enc.slots == 0) {
            enc.slots = d.tokens.size();
        } else if (d.tokens.size() != enc.slots) {
            throw ContractViolation("one_hot_encode: days have different slot counts");
        }
        for (const auto& t : d.tokens) {
            if (t != kNowhere) seen.insert(t);
        }
    }
    enc.vocabulary.emplace_back(kNowhere);
    enc.vocabulary.insert(enc.vocabulary.end(), seen.begin(), seen.end());

    std::map<std::string_view, std::size_t> column;
    for (std::size_t v = 0; v < enc.vocabulary.size(); ++v) {
        column.emplace(enc.vocabulary[v], v);
    }
    const std::size_t width = enc.vocabulary.size();
    enc.rows = Matrix(days.size(), enc.slots * width);
    enc.keys.reserve(days.size());
    for (std::size_t i = 0; i < days.size(); ++i) {
        enc.keys.push_back(days[i].key());
        for (std::size_t s = 0; s < enc.slots; ++s) {
            enc.rows(i, s * width + column.at(days[i].tokens[s])) = 1.0;
        }
    }
    return enc;
}

TripletSet select_triplets(std::span<const DayString> days, std::span<const int> labels,
                           std::size_t count, int window_days, std::uint64_t seed) {
    if (labels.size() != days.size()) {
        throw ContractViolation("select_triplets: one label per day required");
    }
    if (window_days < 0) {
        throw ContractViolation("select_triplets: window_days must be non-negative");
    }
    const std::size_t n = days.size();

    // Positive candidates per day, found via the participant's date-sorted days.
    std::map<std::string_view, std::vector<std::size_t>> by_participant;
    for (std::size_t i = 0; i < n; ++i) {
        by_participant[days[i].participant_id].push_back(i);
    }
    std::vector<std::vector<std::size_t>> positives(n);
    for (auto& [_, idx] : by_participant) {
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return days[a].date < days[b].date; });
        std::size_t lo = 0;
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            const std::size_t a = idx[pos];
            while (days_between(days[idx[lo]].date, days[a].date) > window_days) ++lo;
            for (std::size_t q = lo; q < idx.size(); ++q) {
                const std::size_t b = idx[q];
                if (days_between(days[a].date, days[b].date) > window_days) break;
                if (b != a && labels[b] == labels[a]) positives[a].push_back(b);
            }
            std::sort(positives[a].begin(), positives[a].end());
        }
    }

    std::vector<std::size_t> anchors;
    for (std::size_t i = 0; i < n; ++i) {
        // negatives = everything but the anchor and its positives
        if (!positives[i].empty() && n - 1 > positives[i].size()) anchors.push_back(i);
    }
    if (count > 0 && anchors.empty()) {
        throw TripletExhaustedError(
            "select_triplets: no day has both an eligible positive and a negative");
    }

    Rng rng(seed);
    TripletSet out;
    out.seed = seed;
    out.window_days = window_days;
    out.triplets.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t a = anchors[rng.index(anchors.size())];
        const auto& pos = positives[a];
        const std::size_t p = pos[rng.index(pos.size())];
        std::size_t neg = 0;
        do {
            neg = rng.index(n);
        } while (neg == a || std::binary_search(pos.begin(), pos.end(), neg));
        out.triplets.push_back({days[a].key(), days[p].key(), days[neg].key()});
    }
    return out;
}

namespace {

nlohmann::json key_json(const DayKey& k) {
    return nlohmann::json::array({k.participant_id, format_iso_date(k.date)});
}

DayKey key_from(const nlohmann::json& j, std::size_t line) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
        throw DataError("triplets line " + std::to_string(line) + ": key must be [id, date]");
    }
    const auto date = parse_iso_date(j[1].get<std::string>());
    if (!date) {
        throw DataError("triplets line " + std::to_string(line) + ": bad date");
    }
    return {j[0].get<std::string>(), *date};
}

}  // namespace

void write_triplets(std::ostream& out, const TripletSet& set) {
    nlohmann::ordered_json header;
    header["seed"] = set.seed;
    header["window_days"] = set.window_days;
    header["count"] = set.triplets.size();
    out << header.dump() << '\n';
    for (const auto& t : set.triplets) {
        nlohmann::ordered_json j;
        j["anchor"] = key_json(t.anchor);
        j["positive"] = key_json(t.positive);
        j["negative"] = key_json(t.negative);
        out << j.dump() << '\n';
    }
}

TripletSet read_triplets(std::istream& in) {
    TripletSet set;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw DataError("triplets line " + std::to_string(line_no) + ": invalid JSON");
        }
        if (!have_header) {
            if (!j.contains("seed") || !j.contains("window_days")) {
                throw DataError("triplets file must begin with a seed/window_days header");
            }
            set.seed = j["seed"].get<std::uint64_t>();
            set.window_days = j["window_days"].get<int>();
            declared = j.value("count", std::size_t{0});
            have_header = true;
            continue;
        }
        if (!j.contains("anchor") || !j.contains("positive") || !j.contains("negative")) {
            throw DataError("triplets line " + std::to_string(line_no) + ": missing member");
        }
        set.triplets.push_back({key_from(j["anchor"], line_no), key_from(j["positive"], line_no),
                                key_from(j["negative"], line_no)});
    }
    if (have_header && declared != set.triplets.size()) {
        throw DataError("triplets file declares " + std::to_string(declared) + " triplets but holds " +
                        std::to_string(set.triplets.size()));
    }
    return set;
}

TripletSet read_triplets_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open triplets file " + path.string());
    }
    return read_triplets(in);
}

}  // namespace latentflow
