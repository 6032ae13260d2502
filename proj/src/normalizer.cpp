#include "qdet/normalizer.hpp"

#include <algorithm>

namespace qdet {

std::size_t NormalizedProblem::view_count() const {
    std::size_t n = 0;
    for (const auto& vs : views_by_relation) n += vs.size();
    return n;
}

std::vector<ViewDef> NormalizedProblem::all_views() const {
    std::vector<ViewDef> out;
    for (const auto& vs : views_by_relation) out.insert(out.end(), vs.begin(), vs.end());
    return out;
}

namespace {

Predicate nnf_rec(const Predicate& p, bool positive) {
    switch (p.kind) {
        case Predicate::Kind::True:
            return positive ? Predicate::make_true() : Predicate::make_false();
        case Predicate::Kind::False:
            return positive ? Predicate::make_false() : Predicate::make_true();
        case Predicate::Kind::Atom:
            return positive ? p : Predicate::make_not(p);
        case Predicate::Kind::Not:
            return nnf_rec(p.children.front(), !positive);
        case Predicate::Kind::And:
        case Predicate::Kind::Or: {
            bool and_like = (p.kind == Predicate::Kind::And) == positive;
            std::vector<Predicate> children;
            for (const auto& c : p.children) {
                Predicate cn = nnf_rec(c, positive);
                // flatten nested connectives of the same kind
                if ((and_like && cn.kind == Predicate::Kind::And) ||
                    (!and_like && cn.kind == Predicate::Kind::Or)) {
                    for (auto& g : cn.children) children.push_back(std::move(g));
                } else {
                    children.push_back(std::move(cn));
                }
            }
            return and_like ? fold_and(std::move(children)) : fold_or(std::move(children));
        }
    }
    return p;
}

std::vector<ColumnRef> dedup_sorted(std::vector<ColumnRef> cols) {
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return cols;
}

} // namespace

Predicate nnf(const Predicate& p) { return nnf_rec(p, true); }

NormalizedProblem normalize(const Schema& schema, const std::vector<ViewDef>& views,
                            const QueryDef& query) {
    NormalizedProblem out;
    out.schema = schema;
    out.views_by_relation.resize(schema.relations.size());
    for (const ViewDef& v : views) {
        ViewDef nv = v;
        nv.projection = dedup_sorted(std::move(nv.projection));
        nv.predicate = nnf(nv.predicate);
        out.views_by_relation.at(v.source).push_back(std::move(nv));
    }
    out.query.projection = dedup_sorted(query.projection);
    out.query.predicate = nnf(query.predicate);
    return out;
}

NormalizedProblem normalize(const Problem& p) { return normalize(p.schema, p.views, p.query); }

} // namespace qdet
