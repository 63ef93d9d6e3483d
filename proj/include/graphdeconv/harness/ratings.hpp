#pragma once

// User-to-item ratings with a directed trust network: ingestion, dense-core
// sampling, centering and earliest-rating source labels.

#include "graphdeconv/io.hpp"
#include "graphdeconv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace graphdeconv::harness {

struct Rating {
    Index user = 0;  // dense id
    Index item = 0;  // dense id
    double rating = 0.0;
    std::int64_t timestamp = 0;
};

/// Ratings plus the trust network, with users and items remapped to dense
/// 0-based ids. `user_ids[u]` and `item_ids[i]` hold the original ids.
struct RatingsDataset {
    std::vector<std::pair<Index, Index>> trust;  // directed (truster, trustee), dense ids
    std::vector<Rating> ratings;
    std::vector<std::int64_t> user_ids;
    std::vector<std::int64_t> item_ids;
    std::vector<std::string> warnings;

    Index n_users() const { return static_cast<Index>(user_ids.size()); }
    Index n_items() const { return static_cast<Index>(item_ids.size()); }
    bool empty() const { return ratings.empty(); }
};

struct RawRating {
    std::int64_t user = 0;
    std::int64_t item = 0;
    double rating = 0.0;
    std::int64_t timestamp = 0;
    std::size_t line = 0;
};

/// Parses `user_id,item_id,rating,timestamp` lines. A first line starting
/// with `user_id` is treated as a header. Blank lines and lines
/// starting with `#` are skipped.
inline std::vector<RawRating> read_ratings(std::istream& in) {
    std::vector<RawRating> out;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = io::detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto fields = io::detail::split(body, ',');
        const bool header_candidate = first_content;
        first_content = false;
        if (header_candidate && fields[0] == "user_id") continue;
        if (fields.size() != 4) throw ParseError("rating line must be 'user_id,item_id,rating,timestamp'", lineno);
        RawRating r;
        r.line = lineno;
        if (!io::detail::parse_number(fields[0], r.user) || !io::detail::parse_number(fields[1], r.item))
            throw ParseError("user and item ids must be integers", lineno);
        if (!io::detail::parse_number(fields[2], r.rating) || !std::isfinite(r.rating))
            throw ParseError("rating must be a number", lineno);
        if (!io::detail::parse_number(fields[3], r.timestamp)) throw ParseError("timestamp must be an integer", lineno);
        if (r.rating < 1.0 || r.rating > 5.0)
            throw ValidationError("rating " + io::format_double(r.rating) + " on line " + std::to_string(lineno) +
                                  " is outside [1, 5]");
        out.push_back(r);
    }
    return out;
}

/// Builds a dataset from parsed trust edges and ratings. Users are the union
/// of trust endpoints and raters; both id spaces are remapped in ascending
/// order of the original id. Duplicate (user, item) ratings keep the earliest
/// timestamp (the first listed on a tie) and add a warning. Self-trust edges
/// and repeated trust edges are dropped.
inline RatingsDataset build_dataset(const std::vector<io::Edge>& trust_edges, const std::vector<RawRating>& raw) {
    RatingsDataset ds;
    std::map<std::int64_t, Index> users;
    std::map<std::int64_t, Index> items;
    for (const auto& e : trust_edges) {
        users.emplace(e.source, 0);
        users.emplace(e.target, 0);
    }
    for (const auto& r : raw) {
        users.emplace(r.user, 0);
        items.emplace(r.item, 0);
    }
    for (auto& [id, dense] : users) {
        dense = static_cast<Index>(ds.user_ids.size());
        ds.user_ids.push_back(id);
    }
    for (auto& [id, dense] : items) {
        dense = static_cast<Index>(ds.item_ids.size());
        ds.item_ids.push_back(id);
    }

    std::map<std::pair<Index, Index>, std::size_t> seen;
    for (const auto& r : raw) {
        const Rating rec{users.at(r.user), items.at(r.item), r.rating, r.timestamp};
        const auto key = std::make_pair(rec.user, rec.item);
        const auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(key, ds.ratings.size());
            ds.ratings.push_back(rec);
            continue;
        }
        ds.warnings.push_back("duplicate rating for user " + std::to_string(r.user) + ", item " +
                              std::to_string(r.item) + " on line " + std::to_string(r.line) +
                              "; keeping the earliest");
        if (rec.timestamp < ds.ratings[it->second].timestamp) ds.ratings[it->second] = rec;
    }

    std::map<std::pair<Index, Index>, bool> trust_seen;
    for (const auto& e : trust_edges) {
        const Index a = users.at(e.source);
        const Index b = users.at(e.target);
        if (a == b || !trust_seen.emplace(std::make_pair(a, b), true).second) continue;
        ds.trust.emplace_back(a, b);
    }
    return ds;
}

inline RatingsDataset ingest_ratings(std::istream& trust, std::istream& ratings) {
    return build_dataset(io::read_edges(trust), read_ratings(ratings));
}

inline RatingsDataset ingest_ratings(const std::string& trust_path, const std::string& ratings_path) {
    std::ifstream ratings(ratings_path);
    if (!ratings) throw ParseError("cannot open ratings file '" + ratings_path + "'");
    return build_dataset(io::read_edges_file(trust_path), read_ratings(ratings));
}

/// Restriction of a dataset to the given users and items (dense ids), with a
/// fresh dense remap that preserves the original id order.
inline RatingsDataset restrict_dataset(const RatingsDataset& ds, const std::vector<bool>& keep_user,
                                       const std::vector<bool>& keep_item) {
    RatingsDataset out;
    out.warnings = ds.warnings;
    std::vector<Index> user_map(keep_user.size(), -1);
    std::vector<Index> item_map(keep_item.size(), -1);
    for (std::size_t u = 0; u < keep_user.size(); ++u)
        if (keep_user[u]) {
            user_map[u] = static_cast<Index>(out.user_ids.size());
            out.user_ids.push_back(ds.user_ids[u]);
        }
    for (std::size_t i = 0; i < keep_item.size(); ++i)
        if (keep_item[i]) {
            item_map[i] = static_cast<Index>(out.item_ids.size());
            out.item_ids.push_back(ds.item_ids[i]);
        }
    for (const auto& r : ds.ratings) {
        const Index u = user_map[static_cast<std::size_t>(r.user)];
        const Index i = item_map[static_cast<std::size_t>(r.item)];
        if (u >= 0 && i >= 0) out.ratings.push_back({u, i, r.rating, r.timestamp});
    }
    for (const auto& [a, b] : ds.trust) {
        const Index u = user_map[static_cast<std::size_t>(a)];
        const Index v = user_map[static_cast<std::size_t>(b)];
        if (u >= 0 && v >= 0) out.trust.emplace_back(u, v);
    }
    return out;
}

struct CoreIteration {
    int iteration = 0;
    Index n_users = 0;
    Index n_items = 0;
    std::size_t n_ratings = 0;
};

struct CoreSample {
    RatingsDataset data;
    std::vector<CoreIteration> trace;
    bool empty() const { return data.ratings.empty(); }
};

/// Repeats until nothing changes:
///   1. keep items rated by at least `min_raters_per_item` current users;
///   2. keep users who rate at least `min_items_per_user` current items;
///   3. keep the component of the symmetrized trust graph (over the current
///      users) that contains a user drawn uniformly with `seed`.
/// Users or items are never added back, so the loop ends after at most
/// |users| + |items| rounds.
inline CoreSample sample_dense_core(const RatingsDataset& ds, Index min_raters_per_item, Index min_items_per_user,
                                    const RngSeed& seed) {
    if (min_raters_per_item < 1 || min_items_per_user < 1) throw DomainError("n_min must be at least 1");
    const auto nu = static_cast<std::size_t>(ds.n_users());
    const auto ni = static_cast<std::size_t>(ds.n_items());
    std::vector<bool> user(nu, true);
    std::vector<bool> item(ni, true);
    auto engine = make_engine(seed);

    std::vector<std::vector<Index>> nbrs(nu);
    for (const auto& [a, b] : ds.trust) {
        nbrs[static_cast<std::size_t>(a)].push_back(b);
        nbrs[static_cast<std::size_t>(b)].push_back(a);
    }

    CoreSample out;
    const std::size_t max_rounds = nu + ni + 1;
    for (std::size_t round = 1; round <= max_rounds; ++round) {
        bool changed = false;

        std::vector<Index> raters(ni, 0);
        for (const auto& r : ds.ratings)
            if (user[static_cast<std::size_t>(r.user)] && item[static_cast<std::size_t>(r.item)])
                ++raters[static_cast<std::size_t>(r.item)];
        for (std::size_t i = 0; i < ni; ++i)
            if (item[i] && raters[i] < min_raters_per_item) {
                item[i] = false;
                changed = true;
            }

        std::vector<Index> rated(nu, 0);
        for (const auto& r : ds.ratings)
            if (user[static_cast<std::size_t>(r.user)] && item[static_cast<std::size_t>(r.item)])
                ++rated[static_cast<std::size_t>(r.user)];
        for (std::size_t u = 0; u < nu; ++u)
            if (user[u] && rated[u] < min_items_per_user) {
                user[u] = false;
                changed = true;
            }

        std::vector<Index> candidates;
        for (std::size_t u = 0; u < nu; ++u)
            if (user[u]) candidates.push_back(static_cast<Index>(u));
        if (!candidates.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
            const Index root = candidates[pick(engine)];
            std::vector<bool> reached(nu, false);
            std::vector<Index> stack{root};
            reached[static_cast<std::size_t>(root)] = true;
            while (!stack.empty()) {
                const Index v = stack.back();
                stack.pop_back();
                for (const Index w : nbrs[static_cast<std::size_t>(v)]) {
                    const auto wi = static_cast<std::size_t>(w);
                    if (user[wi] && !reached[wi]) {
                        reached[wi] = true;
                        stack.push_back(w);
                    }
                }
            }
            for (std::size_t u = 0; u < nu; ++u)
                if (user[u] && !reached[u]) {
                    user[u] = false;
                    changed = true;
                }
        }

        CoreIteration it;
        it.iteration = static_cast<int>(round);
        it.n_users = static_cast<Index>(std::count(user.begin(), user.end(), true));
        it.n_items = static_cast<Index>(std::count(item.begin(), item.end(), true));
        for (const auto& r : ds.ratings)
            if (user[static_cast<std::size_t>(r.user)] && item[static_cast<std::size_t>(r.item)]) ++it.n_ratings;
        out.trace.push_back(it);
        if (!changed || it.n_users == 0 || it.n_items == 0) break;
    }
    out.data = restrict_dataset(ds, user, item);
    return out;
}

/// Users x items matrix with rating - 3 on rated cells and 0 elsewhere.
inline Matrix center_ratings(const RatingsDataset& ds) {
    Matrix y = Matrix::Zero(ds.n_users(), ds.n_items());
    for (const auto& r : ds.ratings) y(r.user, r.item) = r.rating - 3.0;
    return y;
}

inline Mask rated_mask(const RatingsDataset& ds) {
    Mask m = Mask::Constant(ds.n_users(), ds.n_items(), false);
    for (const auto& r : ds.ratings) m(r.user, r.item) = true;
    return m;
}

/// Per item, the ceil(theta_sr * count) earliest ratings; timestamp ties are
/// broken by ascending original user id.
inline Mask earliest_source_labels(const RatingsDataset& ds, double theta_sr) {
    if (!(theta_sr > 0.0 && theta_sr < 1.0)) throw DomainError("theta_sr must lie in (0, 1)");
    std::vector<std::vector<const Rating*>> per_item(static_cast<std::size_t>(ds.n_items()));
    for (const auto& r : ds.ratings) per_item[static_cast<std::size_t>(r.item)].push_back(&r);
    Mask labels = Mask::Constant(ds.n_users(), ds.n_items(), false);
    for (auto& list : per_item) {
        if (list.empty()) continue;
        std::sort(list.begin(), list.end(), [&](const Rating* a, const Rating* b) {
            if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
            return ds.user_ids[static_cast<std::size_t>(a->user)] < ds.user_ids[static_cast<std::size_t>(b->user)];
        });
        // the small slack keeps products like 0.1 * 30 from rounding up to 4
        const double want = theta_sr * static_cast<double>(list.size());
        const auto k = static_cast<std::size_t>(std::ceil(want - 1e-9 * want));
        for (std::size_t j = 0; j < std::max<std::size_t>(k, 1); ++j) labels(list[j]->user, list[j]->item) = true;
    }
    return labels;
}

/// Undirected graph over users with A = (W + W^T) / 2, W the 0/1 trust matrix.
inline Graph trust_graph(const RatingsDataset& ds) {
    Matrix w = Matrix::Zero(ds.n_users(), ds.n_users());
    for (const auto& [a, b] : ds.trust) w(a, b) = 1.0;
    return Graph(0.5 * (w + w.transpose()));
}

}  // namespace graphdeconv::harness
