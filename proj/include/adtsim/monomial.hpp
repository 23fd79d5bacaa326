#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "adtsim/signal.hpp"

namespace adtsim {

/// One Volterra monomial over delayed in-phase/quadrature samples, e.g.
/// i[n] i[n-1] q[n]^2. Canonical form: factors sorted by (component, delay),
/// strictly positive exponents.
struct MonomialSpec {
    struct Factor {
        int component = 0;  ///< 0 = i, 1 = q
        int delay = 0;
        int exponent = 1;

        auto operator<=>(const Factor&) const = default;
    };
    std::vector<Factor> factors;

    int degree() const;
    /// Canonical text form, e.g. "i0*i1*q0^2".
    std::string str() const;
    static MonomialSpec parse(const std::string& text);

    bool operator==(const MonomialSpec&) const = default;
};

/// All monomials up to degree M over i-delays < mem_i and q-delays < mem_q,
/// ordered by ascending degree then lexicographically on the sorted factor list.
struct MonomialBasis {
    std::vector<MonomialSpec> specs;
    int max_degree = 0;
    int mem_i = 0;
    int mem_q = 0;

    std::size_t size() const { return specs.size(); }
    /// Index of a canonical spec, or -1 when absent.
    long index_of(const MonomialSpec& s) const;
};

MonomialBasis enumerate_monomials(int max_degree, int mem_i, int mem_q);

/// n_d x N matrix of monomial streams; delays wrap circularly.
Eigen::MatrixXd eval_monomials(const ComplexSignal& xd, const MonomialBasis& basis);

/// Streaming variant: samples before the record start read as zero.
Eigen::MatrixXd eval_monomials_streaming(const ComplexSignal& xd, const MonomialBasis& basis);

/// Single column of eval_monomials, written into out (resized to xd.size()).
void eval_monomial_column(const ComplexSignal& xd, const MonomialSpec& spec,
                          Eigen::VectorXd& out);

}  // namespace adtsim
