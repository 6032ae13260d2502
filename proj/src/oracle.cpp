#include "qdet/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "qdet/evaluator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qdet {

namespace {

constexpr std::size_t kMaxTupleSpace = 4096;   // per-relation candidate tuples
constexpr std::uint64_t kMaxJoinCombos = 1 << 20;

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b)
        return std::numeric_limits<std::uint64_t>::max();
    return a + b;
}

/// C(n, k) with saturation.
std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        result = saturating_mul(result, n - i);
        result /= i + 1;
    }
    return result;
}

void collect_string_literals(const Predicate& p, std::set<std::string>& out) {
    if (p.kind == Predicate::Kind::Atom) {
        for (const Term* t : {&p.lhs, &p.rhs})
            if (t->kind == Term::Kind::Constant && t->constant.sort == Sort::String)
                out.insert(t->constant.as_text());
        return;
    }
    for (const auto& c : p.children) collect_string_literals(c, out);
}

std::vector<Value> domain_values(Sort sort, std::size_t d,
                                 const std::vector<std::string>& string_pool) {
    std::vector<Value> out;
    switch (sort) {
        case Sort::Uninterpreted:
            for (std::size_t i = 0; i < d; ++i)
                out.push_back(Value::uninterpreted(static_cast<std::int64_t>(i)));
            break;
        case Sort::Int:
            for (std::size_t i = 0; i < d; ++i)
                out.push_back(Value::integer(static_cast<std::int64_t>(i)));
            break;
        case Sort::Bool:
            out.push_back(Value::boolean(false));
            if (d >= 2) out.push_back(Value::boolean(true));
            break;
        case Sort::String: {
            // declared literals first so predicates can actually match them
            for (const auto& s : string_pool) {
                if (out.size() == d) break;
                out.push_back(Value::text(s));
            }
            std::size_t k = 0;
            while (out.size() < d) {
                std::string fresh = "#" + std::to_string(k++);
                if (std::find(string_pool.begin(), string_pool.end(), fresh) != string_pool.end())
                    continue;
                out.push_back(Value::text(fresh));
            }
            break;
        }
    }
    return out;
}

/// All subsets of {0..n-1} of size <= max, ordered by size then
/// lexicographically; this fixes the instance enumeration order.
std::vector<std::vector<std::uint32_t>> enumerate_subsets(std::size_t n, std::size_t max) {
    std::vector<std::vector<std::uint32_t>> out;
    out.push_back({});
    std::vector<std::uint32_t> combo;
    for (std::size_t k = 1; k <= std::min(max, n); ++k) {
        combo.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i) combo[i] = static_cast<std::uint32_t>(i);
        while (true) {
            out.push_back(combo);
            // next lexicographic k-combination
            std::size_t i = k;
            while (i > 0 && combo[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++combo[i - 1];
            for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
        }
    }
    return out;
}

struct RelationSpace {
    std::vector<Tuple> tuples;                     // the candidate tuples over the domain
    std::vector<std::vector<std::uint32_t>> subsets;
    std::vector<std::uint32_t> subset_class;       // view-signature class per subset
};

struct Universe {
    std::vector<RelationSpace> relations;
    std::uint64_t instance_count = 0;

    // per joined tuple-index combination (mixed radix, relation 0 fastest):
    // the id of its projected row, or -1 when the query predicate fails
    std::vector<std::int32_t> combo_proj;
    std::vector<std::uint64_t> combo_stride;
    std::size_t q_words = 0;

    std::vector<std::uint64_t> class_stride; // mixed-radix packing of class ids

    std::size_t decode(std::uint64_t id, std::size_t relation) const {
        std::uint64_t v = id;
        for (std::size_t i = 0; i < relation; ++i) v /= relations[i].subsets.size();
        return static_cast<std::size_t>(v % relations[relation].subsets.size());
    }

    Instance materialize(const NormalizedProblem& p, std::uint64_t id) const {
        Instance inst;
        for (std::size_t i = 0; i < relations.size(); ++i) {
            std::set<Tuple> rows;
            for (std::uint32_t t : relations[i].subsets[decode(id, i)])
                rows.insert(relations[i].tuples[t]);
            inst.relations[p.schema.relation(i).name] = std::move(rows);
        }
        return inst;
    }
};

Universe build_universe(const NormalizedProblem& p, const OracleBounds& bounds) {
    if (bounds.domain_size < 1)
        throw std::invalid_argument("oracle domain_size must be at least 1");

    std::set<std::string> string_set;
    for (const auto& vs : p.views_by_relation)
        for (const auto& v : vs) collect_string_literals(v.predicate, string_set);
    collect_string_literals(p.query.predicate, string_set);
    std::vector<std::string> string_pool(string_set.begin(), string_set.end());

    Universe u;
    std::uint64_t instances = 1;
    for (std::size_t i = 0; i < p.relation_count(); ++i) {
        const RelationDecl& decl = p.schema.relation(i);
        std::uint64_t space = 1;
        for (const ColumnDecl& col : decl.columns)
            space = saturating_mul(space,
                                   domain_values(col.sort, bounds.domain_size, string_pool).size());
        if (space > kMaxTupleSpace)
            throw Error(ErrorCode::BudgetExceeded,
                        "candidate tuple space for relation " + decl.name + " has " +
                            std::to_string(space) + " tuples (cap " +
                            std::to_string(kMaxTupleSpace) + "); lower --domain-size");
        std::uint64_t subset_count = 0;
        for (std::uint64_t k = 0; k <= bounds.max_tuples; ++k)
            subset_count = saturating_add(subset_count, choose(space, k));
        instances = saturating_mul(instances, subset_count);
    }
    if (instances > bounds.work_budget)
        throw Error(ErrorCode::BudgetExceeded,
                    "bounds enumerate " + std::to_string(instances) +
                        " candidate instances, over the budget of " +
                        std::to_string(bounds.work_budget) +
                        "; lower --domain-size/--max-tuples or raise --budget");
    u.instance_count = instances;

    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < p.relation_count(); ++i) {
        const RelationDecl& decl = p.schema.relation(i);
        RelationSpace space;

        // materialize candidate tuples; leftmost column varies slowest
        std::vector<std::vector<Value>> domains;
        for (const ColumnDecl& col : decl.columns)
            domains.push_back(domain_values(col.sort, bounds.domain_size, string_pool));
        std::vector<std::size_t> cursor(decl.columns.size(), 0);
        while (true) {
            Tuple t;
            for (std::size_t c = 0; c < decl.columns.size(); ++c)
                t.cells.emplace(ColumnRef{decl.name, decl.columns[c].name}, domains[c][cursor[c]]);
            space.tuples.push_back(std::move(t));
            std::size_t c = decl.columns.size();
            while (c > 0 && ++cursor[c - 1] == domains[c - 1].size()) cursor[--c] = 0;
            if (c == 0) break;
        }

        space.subsets = enumerate_subsets(space.tuples.size(), bounds.max_tuples);
        combos = saturating_mul(combos, space.tuples.size());
        u.relations.push_back(std::move(space));
    }
    if (combos > kMaxJoinCombos)
        throw Error(ErrorCode::BudgetExceeded, "join space too large; lower --domain-size");

    // view signatures: per relation, bucket subsets by the projected output
    // of every view over it
    for (std::size_t i = 0; i < p.relation_count(); ++i) {
        RelationSpace& space = u.relations[i];
        const auto& views = p.views_by_relation[i];
        const std::size_t n_tuples = space.tuples.size();

        std::vector<std::vector<std::int32_t>> proj(views.size());
        std::vector<std::size_t> dict_size(views.size(), 0);
        for (std::size_t j = 0; j < views.size(); ++j) {
            proj[j].assign(n_tuples, -1);
            std::map<Tuple, std::int32_t> dict;
            for (std::size_t t = 0; t < n_tuples; ++t) {
                if (!eval_predicate(views[j].predicate, space.tuples[t])) continue;
                Tuple row = sub_tuple(space.tuples[t], views[j].projection);
                auto [it, _] = dict.emplace(std::move(row), static_cast<std::int32_t>(dict.size()));
                proj[j][t] = it->second;
            }
            dict_size[j] = dict.size();
        }

        std::map<std::vector<std::uint64_t>, std::uint32_t> classes;
        space.subset_class.reserve(space.subsets.size());
        for (const auto& subset : space.subsets) {
            std::vector<std::uint64_t> sig;
            for (std::size_t j = 0; j < views.size(); ++j) {
                std::vector<std::uint64_t> mask((dict_size[j] + 63) / 64, 0);
                for (std::uint32_t t : subset)
                    if (proj[j][t] >= 0)
                        mask[static_cast<std::size_t>(proj[j][t]) / 64] |=
                            std::uint64_t{1} << (proj[j][t] % 64);
                sig.insert(sig.end(), mask.begin(), mask.end());
            }
            auto [it, _] = classes.emplace(std::move(sig), static_cast<std::uint32_t>(classes.size()));
            space.subset_class.push_back(it->second);
        }
    }

    // query output per joined combination
    u.combo_stride.resize(p.relation_count());
    std::uint64_t stride = 1;
    for (std::size_t i = 0; i < p.relation_count(); ++i) {
        u.combo_stride[i] = stride;
        stride *= u.relations[i].tuples.size();
    }
    u.combo_proj.assign(stride, -1);
    std::map<Tuple, std::int32_t> q_dict;
    for (std::uint64_t id = 0; id < stride; ++id) {
        Tuple joined;
        std::uint64_t v = id;
        for (std::size_t i = 0; i < p.relation_count(); ++i) {
            const auto& t = u.relations[i].tuples[v % u.relations[i].tuples.size()];
            joined.cells.insert(t.cells.begin(), t.cells.end());
            v /= u.relations[i].tuples.size();
        }
        if (!eval_predicate(p.query.predicate, joined)) continue;
        Tuple row = sub_tuple(joined, p.query.projection);
        auto [it, _] = q_dict.emplace(std::move(row), static_cast<std::int32_t>(q_dict.size()));
        u.combo_proj[id] = it->second;
    }
    u.q_words = (q_dict.size() + 63) / 64;

    u.class_stride.resize(p.relation_count());
    std::uint64_t cs = 1;
    for (std::size_t i = 0; i < p.relation_count(); ++i) {
        u.class_stride[i] = cs;
        std::uint32_t max_class = 0;
        for (std::uint32_t c : u.relations[i].subset_class) max_class = std::max(max_class, c);
        cs = saturating_mul(cs, max_class + 1);
    }
    return u;
}

/// View-signature key and query-output bitmask of one candidate instance.
void instance_key(const Universe& u, std::uint64_t id, std::uint64_t& key,
                  std::uint64_t* q_mask) {
    const std::size_t m = u.relations.size();
    key = 0;
    for (std::size_t w = 0; w < u.q_words; ++w) q_mask[w] = 0;

    std::uint64_t v = id;
    static thread_local std::vector<const std::vector<std::uint32_t>*> chosen;
    chosen.assign(m, nullptr);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t s = static_cast<std::size_t>(v % u.relations[i].subsets.size());
        v /= u.relations[i].subsets.size();
        key += u.class_stride[i] * u.relations[i].subset_class[s];
        chosen[i] = &u.relations[i].subsets[s];
    }

    // all member combinations of the chosen subsets
    static thread_local std::vector<std::size_t> cursor;
    cursor.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        if (chosen[i]->empty()) return; // empty relation: query output empty
    while (true) {
        std::uint64_t combo = 0;
        for (std::size_t i = 0; i < m; ++i)
            combo += u.combo_stride[i] * (*chosen[i])[cursor[i]];
        std::int32_t bit = u.combo_proj[combo];
        if (bit >= 0) q_mask[static_cast<std::size_t>(bit) / 64] |= std::uint64_t{1} << (bit % 64);
        std::size_t i = 0;
        while (i < m && ++cursor[i] == chosen[i]->size()) cursor[i++] = 0;
        if (i == m) break;
    }
}

OracleResult make_result(const NormalizedProblem& p, const OracleBounds& bounds,
                         const Universe& u, std::uint64_t scanned,
                         std::optional<std::pair<std::uint64_t, std::uint64_t>> pair_ids) {
    OracleResult result;
    result.bounds = bounds;
    result.instances_enumerated = scanned;
    if (!pair_ids) {
        result.determined_up_to_bounds = true;
        return result;
    }
    Instance a = u.materialize(p, pair_ids->first);
    Instance b = u.materialize(p, pair_ids->second);
    auto views = p.all_views();
    if (!views_equal(views, p.schema, a, b) ||
        eval_query(p.query, p.schema, a) == eval_query(p.query, p.schema, b))
        throw Error(ErrorCode::VerificationFailed,
                    "oracle produced a pair that fails its own definition check");
    result.determined_up_to_bounds = false;
    result.counterexample = {std::move(a), std::move(b)};
    return result;
}

OracleResult grouped_scan(const NormalizedProblem& p, const OracleBounds& bounds, bool parallel) {
    Universe u = build_universe(p, bounds);
    const std::uint64_t n = u.instance_count;
    const std::size_t w = u.q_words;

    std::vector<std::uint64_t> keys(n);
    std::vector<std::uint64_t> masks(n * std::max<std::size_t>(w, 1));

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && n > 1024)
#endif
    for (std::int64_t id = 0; id < static_cast<std::int64_t>(n); ++id)
        instance_key(u, static_cast<std::uint64_t>(id), keys[id],
                     masks.data() + static_cast<std::uint64_t>(id) * std::max<std::size_t>(w, 1));
#ifndef _OPENMP
    (void)parallel;
#endif

    // first instance of every signature class; any later member with a
    // different query output yields the first violating pair
    std::unordered_map<std::uint64_t, std::uint64_t> first_of_class;
    first_of_class.reserve(static_cast<std::size_t>(n / 4 + 16));
    for (std::uint64_t id = 0; id < n; ++id) {
        auto [it, inserted] = first_of_class.emplace(keys[id], id);
        if (inserted) continue;
        const std::uint64_t* a = masks.data() + it->second * std::max<std::size_t>(w, 1);
        const std::uint64_t* b = masks.data() + id * std::max<std::size_t>(w, 1);
        bool equal = true;
        for (std::size_t i = 0; i < w && equal; ++i) equal = a[i] == b[i];
        if (!equal) return make_result(p, bounds, u, id + 1, {{it->second, id}});
    }
    return make_result(p, bounds, u, n, std::nullopt);
}

/// Direct transcription of the determinacy definition over the bounded
/// instance space; quadratic in the number of instances.
OracleResult reference_scan(const NormalizedProblem& p, const OracleBounds& bounds) {
    Universe u = build_universe(p, bounds);
    const std::uint64_t n = u.instance_count;
    auto views = p.all_views();

    std::vector<Instance> instances;
    std::vector<std::vector<Relation>> view_results;
    std::vector<Relation> query_results;
    instances.reserve(n);
    for (std::uint64_t id = 0; id < n; ++id) {
        Instance inst = u.materialize(p, id);
        std::vector<Relation> vr;
        vr.reserve(views.size());
        for (const ViewDef& v : views) vr.push_back(eval_view(v, p.schema, inst));
        view_results.push_back(std::move(vr));
        query_results.push_back(eval_query(p.query, p.schema, inst));
        instances.push_back(std::move(inst));
    }
    for (std::uint64_t b = 1; b < n; ++b)
        for (std::uint64_t a = 0; a < b; ++a)
            if (view_results[a] == view_results[b] && query_results[a] != query_results[b])
                return make_result(p, bounds, u, b + 1, {{a, b}});
    return make_result(p, bounds, u, n, std::nullopt);
}

} // namespace

OracleResult oracle_check(const NormalizedProblem& p, const OracleBounds& bounds, OracleMode mode) {
    switch (mode) {
        case OracleMode::Parallel: return grouped_scan(p, bounds, true);
        case OracleMode::Serial: return grouped_scan(p, bounds, false);
        case OracleMode::Reference: return reference_scan(p, bounds);
    }
    return grouped_scan(p, bounds, true);
}

} // namespace qdet
