#ifndef VCONS_GENERATOR_HPP
#define VCONS_GENERATOR_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "vcons/model.hpp"
#include "vcons/statespace.hpp"

namespace vcons
{

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Infinitesimal generator over a StateSpace. Off-diagonal entries are
/// non-negative rates and each diagonal entry is minus its row's outflow.
class RateMatrix
{
public:
    explicit RateMatrix(SparseRows a);

    std::size_t dimension() const { return static_cast<std::size_t>(m_a.rows()); }
    const SparseRows& matrix() const { return m_a; }

    /// Largest |A_kk|, the fastest exit rate of any state.
    double max_exit_rate() const { return m_max_exit; }
    /// Maximum absolute row sum.
    double norm_inf() const { return m_norm_inf; }

    /// Out-neighbours of state k (positive off-diagonal entries).
    std::vector<std::size_t> successors(std::size_t k) const;

    /// Writes one "row col rate" triple per stored entry.
    void dump(std::ostream& out) const;

private:
    SparseRows m_a;
    double m_max_exit = 0;
    double m_norm_inf = 0;
};

/// C(n,k) q^k (1-q)^(n-k), zero outside 0 <= k <= n. Evaluated in log space.
double binomial_pmf(int k, int n, double q);

/// Rate of the jump (i,j) -> (i+k,j): one refresh per D seconds reaching a
/// binomial number of the uncovered occupants, with the coverage count
/// mixed between floor and ceil of n_ave. k = 0 is a valid query and
/// returns the null-event rate that the generator drops.
double epidemic_rate(int i, int j, int k, const ScenarioParams& params);

RateMatrix build_rate_matrix(const ScenarioParams& params, const ModelOptions& options, const StateSpace& space);

/// Set of states reachable from `start` in the transition graph.
std::vector<bool> reachable_from(const RateMatrix& m, std::size_t start);

/// Closed communicating classes (strongly connected components with no
/// outgoing edge), each sorted ascending; classes ordered by smallest member.
std::vector<std::vector<std::size_t>> recurrent_classes(const RateMatrix& m);

struct GeneratorDiagnostics
{
    double max_row_residual = 0;
    double norm_inf = 0;
    std::size_t negative_off_diagonals = 0;
    std::vector<State> unreachable;
    std::size_t recurrent_class_count = 0;

    bool row_sums_ok(double rel_tol = 1e-12) const { return max_row_residual <= rel_tol * norm_inf; }
    bool unique_recurrent_class() const { return recurrent_class_count == 1; }
};

GeneratorDiagnostics validate_generator(const RateMatrix& m, const StateSpace& space, State start);

} // namespace vcons

#endif
