#pragma once
// Clusters the 52 calendar weeks of the hourly series into k representative
// weeks. Each representative hour carries a weight so that annual totals are
// preserved exactly: a plain week counts 1, and the week holding the year's
// trailing 24 hours counts 192/168 = 8/7. Weights are therefore kept as
// integer numerators over a fixed denominator of 7.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "retroplan/domain.hpp"
#include "retroplan/errors.hpp"

namespace retroplan {

constexpr long kWeightDenom = 7;

struct RepPeriod {
    int medoid_week = 0;                // original week index, 0-based
    std::vector<int> member_weeks;      // cluster members, ascending
    long weight_num = kWeightDenom;     // per-hour weight, in sevenths
};

struct ReducedSeries {
    int k = 1;
    int hours_per_period = kHoursPerWeek;
    std::vector<RepPeriod> periods;     // ordered by medoid week
    std::vector<int> hour_index;        // k * hours_per_period indices into the 8760-h year
    SeriesTable reduced;                // every original series restricted to the rep hours

    int total_hours() const { return k * hours_per_period; }
    double weight(int period) const {
        return static_cast<double>(periods[period].weight_num) / kWeightDenom;
    }
    // Sum of weights over all representative hours, times the denominator.
    // Equals 8760 * 7 whenever annual totals are conserved.
    long weight_sum_num() const {
        long s = 0;
        for (const auto& p : periods) s += p.weight_num;
        return s * hours_per_period;
    }
    const std::vector<double>& values(const std::string& id) const {
        auto it = reduced.find(id);
        if (it == reduced.end()) throw MissingVariable("reduced series '" + id + "' not found");
        return it->second;
    }
    double value(const std::string& id, int t) const { return values(id)[t]; }
};

namespace detail {

inline double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace detail

// Builds a ReducedSeries directly from an explicit set of periods; used for
// hand-made reductions in studies and tests. `weight_nums` are per-hour
// weights in sevenths.
inline ReducedSeries make_reduction(const SeriesTable& table, int hours_per_period,
                                    const std::vector<int>& start_hours,
                                    const std::vector<long>& weight_nums) {
    if (start_hours.size() != weight_nums.size() || start_hours.empty())
        throw DomainError("make_reduction: periods and weights must align");
    ReducedSeries out;
    out.k = static_cast<int>(start_hours.size());
    out.hours_per_period = hours_per_period;
    for (size_t p = 0; p < start_hours.size(); ++p) {
        RepPeriod rp;
        rp.medoid_week = start_hours[p] / kHoursPerWeek;
        rp.member_weeks = {rp.medoid_week};
        rp.weight_num = weight_nums[p];
        out.periods.push_back(rp);
        for (int h = 0; h < hours_per_period; ++h) out.hour_index.push_back(start_hours[p] + h);
    }
    for (const auto& [id, values] : table) {
        std::vector<double> slice;
        slice.reserve(out.hour_index.size());
        for (int g : out.hour_index) slice.push_back(values.at(g));
        out.reduced[id] = std::move(slice);
    }
    return out;
}

// k-means over the 52 weeks of the listed feature series. Deterministic:
// the first center comes from `seed`, the rest by farthest-point selection,
// and every tie breaks toward the lowest week index. The representative of
// a cluster is its medoid so capacity factors stay physical.
inline ReducedSeries reduce(const SeriesTable& table, const std::vector<std::string>& feature_ids,
                            int k, std::uint64_t seed) {
    if (k < 1 || k > kWeeksPerYear)
        throw DomainError("reduce: k must be in [1,52], got " + std::to_string(k));
    for (const auto& id : feature_ids) {
        auto it = table.find(id);
        if (it == table.end()) throw DanglingReference("reduce: unknown feature series '" + id + "'");
        if (static_cast<int>(it->second.size()) != kHoursPerYear)
            throw DomainError("reduce: series '" + id + "' is not 8760 hours long");
    }

    const int n = kWeeksPerYear;

    // feature vector per week: concatenated 168-h slices, min-max normalized per series
    std::vector<std::vector<double>> feat(n);
    for (auto& f : feat) f.reserve(feature_ids.size() * kHoursPerWeek);
    for (const auto& id : feature_ids) {
        const auto& v = table.at(id);
        double lo = *std::min_element(v.begin(), v.end());
        double hi = *std::max_element(v.begin(), v.end());
        double span = hi - lo;
        for (int w = 0; w < n; ++w)
            for (int h = 0; h < kHoursPerWeek; ++h) {
                double x = v[w * kHoursPerWeek + h];
                feat[w].push_back(span > 0 ? (x - lo) / span : 0.0);
            }
    }

    int distinct = 0;
    {
        std::vector<int> seen;
        for (int w = 0; w < n; ++w) {
            bool dup = false;
            for (int s : seen) dup |= feat[s] == feat[w];
            if (!dup) {
                seen.push_back(w);
                ++distinct;
            }
        }
    }
    if (k > distinct)
        throw DegenerateCluster("reduce: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(distinct) + " distinct weeks");

    // farthest-point initialization
    std::vector<std::vector<double>> centroids;
    std::vector<int> center_weeks;
    center_weeks.push_back(static_cast<int>(seed % n));
    centroids.push_back(feat[center_weeks[0]]);
    while (static_cast<int>(centroids.size()) < k) {
        int best = -1;
        double best_d = -1;
        for (int w = 0; w < n; ++w) {
            double d = std::numeric_limits<double>::max();
            for (const auto& c : centroids) d = std::min(d, detail::sqdist(feat[w], c));
            if (d > best_d + 1e-15) {
                best_d = d;
                best = w;
            }
        }
        center_weeks.push_back(best);
        centroids.push_back(feat[best]);
    }

    std::vector<int> assign(n, -1);
    double prev_wcss = std::numeric_limits<double>::max();
    for (int iter = 0; iter < 300; ++iter) {
        // assignment step
        std::vector<int> next(n);
        for (int w = 0; w < n; ++w) {
            int arg = 0;
            double best = detail::sqdist(feat[w], centroids[0]);
            for (int c = 1; c < k; ++c) {
                double d = detail::sqdist(feat[w], centroids[c]);
                if (d < best - 1e-15) {
                    best = d;
                    arg = c;
                }
            }
            next[w] = arg;
        }

        // re-seed any emptied cluster from the point farthest to its current centroid
        bool reseeded = false;
        for (int c = 0; c < k; ++c) {
            if (std::count(next.begin(), next.end(), c) > 0) continue;
            reseeded = true;
            int far = -1;
            double far_d = -1;
            for (int w = 0; w < n; ++w) {
                if (std::count(next.begin(), next.end(), next[w]) <= 1) continue;
                double d = detail::sqdist(feat[w], centroids[next[w]]);
                if (d > far_d + 1e-15) {
                    far_d = d;
                    far = w;
                }
            }
            if (far < 0) throw DegenerateCluster("reduce: cannot repopulate empty cluster");
            next[far] = c;
            centroids[c] = feat[far];
        }

        bool changed = next != assign;
        assign = next;

        // update step
        double wcss = 0;
        for (int c = 0; c < k; ++c) {
            std::vector<double> mean(feat[0].size(), 0.0);
            int count = 0;
            for (int w = 0; w < n; ++w)
                if (assign[w] == c) {
                    for (size_t i = 0; i < mean.size(); ++i) mean[i] += feat[w][i];
                    ++count;
                }
            for (auto& m : mean) m /= count;
            centroids[c] = std::move(mean);
            for (int w = 0; w < n; ++w)
                if (assign[w] == c) wcss += detail::sqdist(feat[w], centroids[c]);
        }
        assert(reseeded || wcss <= prev_wcss + 1e-9 * (1 + prev_wcss));
        (void)reseeded;
        prev_wcss = wcss;
        if (!changed) break;
    }

    // medoids and weights; periods ordered by medoid week
    std::vector<RepPeriod> periods(k);
    for (int c = 0; c < k; ++c) {
        RepPeriod& p = periods[c];
        double best = std::numeric_limits<double>::max();
        for (int w = 0; w < n; ++w) {
            if (assign[w] != c) continue;
            p.member_weeks.push_back(w);
            double d = detail::sqdist(feat[w], centroids[c]);
            if (d < best - 1e-15) {
                best = d;
                p.medoid_week = w;
            }
        }
        p.weight_num = kWeightDenom * static_cast<long>(p.member_weeks.size());
        // the year's trailing 24 h ride on week 52: scale its weight by 192/168 = 8/7
        if (std::find(p.member_weeks.begin(), p.member_weeks.end(), kWeeksPerYear - 1) !=
            p.member_weeks.end())
            p.weight_num += 1;
    }
    std::sort(periods.begin(), periods.end(),
              [](const RepPeriod& a, const RepPeriod& b) { return a.medoid_week < b.medoid_week; });

    ReducedSeries out;
    out.k = k;
    out.hours_per_period = kHoursPerWeek;
    out.periods = std::move(periods);
    for (const auto& p : out.periods)
        for (int h = 0; h < kHoursPerWeek; ++h)
            out.hour_index.push_back(p.medoid_week * kHoursPerWeek + h);
    for (const auto& [id, values] : table) {
        if (static_cast<int>(values.size()) != kHoursPerYear) continue;
        std::vector<double> slice;
        slice.reserve(out.hour_index.size());
        for (int g : out.hour_index) slice.push_back(values[g]);
        out.reduced[id] = std::move(slice);
    }
    return out;
}

// Feature ids for clustering: every zone demand series plus every
// renewable capacity factor series, equally weighted after normalization.
inline std::vector<std::string> default_feature_ids(const SystemData& data) {
    std::vector<std::string> ids;
    for (const auto& z : data.zones)
        if (!z.demand_series_ref.empty()) ids.push_back(z.demand_series_ref);
    for (const auto& r : data.renewables) ids.push_back(r.capacity_factor_series_ref);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace retroplan
