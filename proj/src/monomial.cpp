#include "adtsim/monomial.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace adtsim {

int MonomialSpec::degree() const {
    int d = 0;
    for (const auto& f : factors) d += f.exponent;
    return d;
}

std::string MonomialSpec::str() const {
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += '*';
        s += (factors[i].component == 0) ? 'i' : 'q';
        s += std::to_string(factors[i].delay);
        if (factors[i].exponent != 1) {
            s += '^';
            s += std::to_string(factors[i].exponent);
        }
    }
    return s;
}

MonomialSpec MonomialSpec::parse(const std::string& text) {
    MonomialSpec spec;
    std::size_t pos = 0;
    while (pos < text.size()) {
        MonomialSpec::Factor f;
        if (text[pos] == 'i')
            f.component = 0;
        else if (text[pos] == 'q')
            f.component = 1;
        else
            throw std::invalid_argument("MonomialSpec::parse: expected 'i' or 'q' in '" + text + "'");
        ++pos;
        std::size_t end = pos;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == pos) throw std::invalid_argument("MonomialSpec::parse: missing delay in '" + text + "'");
        f.delay = std::stoi(text.substr(pos, end - pos));
        pos = end;
        f.exponent = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            end = pos;
            while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
            if (end == pos) throw std::invalid_argument("MonomialSpec::parse: missing exponent in '" + text + "'");
            f.exponent = std::stoi(text.substr(pos, end - pos));
            pos = end;
        }
        spec.factors.push_back(f);
        if (pos < text.size()) {
            if (text[pos] != '*')
                throw std::invalid_argument("MonomialSpec::parse: expected '*' in '" + text + "'");
            ++pos;
        }
    }
    if (spec.factors.empty())
        throw std::invalid_argument("MonomialSpec::parse: empty monomial");
    if (!std::is_sorted(spec.factors.begin(), spec.factors.end(),
                        [](const auto& a, const auto& b) {
                            return std::pair{a.component, a.delay} < std::pair{b.component, b.delay};
                        }))
        throw std::invalid_argument("MonomialSpec::parse: factors not in canonical order in '" + text + "'");
    return spec;
}

long MonomialBasis::index_of(const MonomialSpec& s) const {
    for (std::size_t k = 0; k < specs.size(); ++k)
        if (specs[k] == s) return static_cast<long>(k);
    return -1;
}

MonomialBasis enumerate_monomials(int max_degree, int mem_i, int mem_q) {
    if (max_degree < 1) throw std::invalid_argument("enumerate_monomials: max degree must be >= 1");
    if (mem_i < 0 || mem_q < 0)
        throw std::invalid_argument("enumerate_monomials: memory depths must be >= 0");
    if (mem_i + mem_q < 1)
        throw std::invalid_argument("enumerate_monomials: need at least one variable");

    // Variables in canonical order: i0..i(mem_i-1), q0..q(mem_q-1).
    const int n_vars = mem_i + mem_q;
    auto var_factor = [&](int v) {
        MonomialSpec::Factor f;
        if (v < mem_i) {
            f.component = 0;
            f.delay = v;
        } else {
            f.component = 1;
            f.delay = v - mem_i;
        }
        f.exponent = 1;
        return f;
    };

    MonomialBasis basis;
    basis.max_degree = max_degree;
    basis.mem_i = mem_i;
    basis.mem_q = mem_q;

    // Multisets of each degree in nondecreasing variable order give the
    // lexicographic ordering on sorted factor lists directly.
    std::vector<int> pick;
    for (int deg = 1; deg <= max_degree; ++deg) {
        pick.assign(static_cast<std::size_t>(deg), 0);
        while (true) {
            MonomialSpec spec;
            for (int v : pick) {
                const auto f = var_factor(v);
                if (!spec.factors.empty() && spec.factors.back().component == f.component &&
                    spec.factors.back().delay == f.delay)
                    ++spec.factors.back().exponent;
                else
                    spec.factors.push_back(f);
            }
            basis.specs.push_back(std::move(spec));

            // Next nondecreasing tuple.
            int pos = deg - 1;
            while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == n_vars - 1) --pos;
            if (pos < 0) break;
            const int v = ++pick[static_cast<std::size_t>(pos)];
            for (int j = pos + 1; j < deg; ++j) pick[static_cast<std::size_t>(j)] = v;
        }
    }
    return basis;
}

namespace {

template <bool Periodic>
void eval_column(const ComplexSignal& xd, const MonomialSpec& spec, double* out) {
    const long n = static_cast<long>(xd.size());
    for (long t = 0; t < n; ++t) {
        double acc = 1.0;
        for (const auto& f : spec.factors) {
            const long idx = t - f.delay;
            double v;
            if constexpr (Periodic) {
                const long w = (idx % n + n) % n;
                v = (f.component == 0) ? xd.samples[static_cast<std::size_t>(w)].real()
                                       : xd.samples[static_cast<std::size_t>(w)].imag();
            } else {
                if (idx < 0) {
                    v = 0.0;
                } else {
                    v = (f.component == 0) ? xd.samples[static_cast<std::size_t>(idx)].real()
                                           : xd.samples[static_cast<std::size_t>(idx)].imag();
                }
            }
            for (int e = 0; e < f.exponent; ++e) acc *= v;
        }
        out[t] = acc;
    }
}

}  // namespace

Eigen::MatrixXd eval_monomials(const ComplexSignal& xd, const MonomialBasis& basis) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(xd.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k)
        eval_column<true>(xd, basis.specs[k], v.col(static_cast<Eigen::Index>(k)).data());
    return v;
}

Eigen::MatrixXd eval_monomials_streaming(const ComplexSignal& xd, const MonomialBasis& basis) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(xd.size()), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k)
        eval_column<false>(xd, basis.specs[k], v.col(static_cast<Eigen::Index>(k)).data());
    return v;
}

void eval_monomial_column(const ComplexSignal& xd, const MonomialSpec& spec, Eigen::VectorXd& out) {
    out.resize(static_cast<Eigen::Index>(xd.size()));
    eval_column<true>(xd, spec, out.data());
}

}  // namespace adtsim
