#include "vcons/generator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace vcons
{

RateMatrix::RateMatrix(SparseRows a) : m_a(std::move(a))
{
    if(m_a.rows() != m_a.cols()) {
        throw std::invalid_argument("rate matrix must be square");
    }
    m_a.makeCompressed();
    for(Eigen::Index r = 0; r < m_a.outerSize(); ++r) {
        double row_abs = 0;
        for(SparseRows::InnerIterator it(m_a, r); it; ++it) {
            row_abs += std::abs(it.value());
            if(it.col() == r) {
                m_max_exit = std::max(m_max_exit, std::abs(it.value()));
            }
        }
        m_norm_inf = std::max(m_norm_inf, row_abs);
    }
}

std::vector<std::size_t> RateMatrix::successors(std::size_t k) const
{
    std::vector<std::size_t> out;
    for(SparseRows::InnerIterator it(m_a, static_cast<Eigen::Index>(k)); it; ++it) {
        if(it.col() != it.row() && it.value() > 0) {
            out.push_back(static_cast<std::size_t>(it.col()));
        }
    }
    return out;
}

void RateMatrix::dump(std::ostream& out) const
{
    const auto precision = out.precision(17);
    for(Eigen::Index r = 0; r < m_a.outerSize(); ++r) {
        for(SparseRows::InnerIterator it(m_a, r); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
    out.precision(precision);
}

double binomial_pmf(int k, int n, double q)
{
    if(k < 0 || n < 0 || k > n) {
        return 0.0;
    }
    // Degenerate success probabilities would give 0 * log(0).
    if(q <= 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    if(q >= 1.0) {
        return k == n ? 1.0 : 0.0;
    }
    const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(log_choose + k * std::log(q) + (n - k) * std::log1p(-q));
}

double epidemic_rate(int i, int j, int k, const ScenarioParams& params)
{
    if(i < 0 || j < i || k < 0) {
        return 0.0;
    }
    const int uncovered = j - i;
    const double n_ave = params.n_ave();
    // n_ave can exceed any int-sized occupancy; the min() below bounds it.
    const auto clamp_cover = [uncovered](double c) {
        return c >= uncovered ? uncovered : static_cast<int>(c);
    };
    const int reach_lo = clamp_cover(std::floor(n_ave));
    const int reach_hi = clamp_cover(std::ceil(n_ave));
    if(k > reach_hi) {
        return 0.0;
    }
    const double q = 1.0 - params.p_fail();
    const double p1 = params.p1();
    const double mix = p1 * binomial_pmf(k, reach_lo, q) + (1.0 - p1) * binomial_pmf(k, reach_hi, q);
    return mix / params.refresh_period();
}

RateMatrix build_rate_matrix(const ScenarioParams& params, const ModelOptions& options, const StateSpace& space)
{
    if(space.max_vehicles() != params.max_vehicles()) {
        throw std::invalid_argument("state space and scenario disagree on N");
    }
    const int n = space.max_vehicles();
    const double lambda = params.arrival_rate();
    const double mu = params.departure_rate();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(space.size() * 6);

    for(std::size_t row = 0; row < space.size(); ++row) {
        const auto [i, j] = space[row];
        double outflow = 0;
        const auto add = [&](State to, double rate) {
            if(rate > 0) {
                triplets.emplace_back(static_cast<int>(row), static_cast<int>(space.index_of(to)), rate);
                outflow += rate;
            }
        };

        if(j < n) {
            add({i, j + 1}, lambda);
        }
        if(j > i) {
            add({i, j - 1}, (j - i) * mu);
        }
        if(i > 0) {
            add({i - 1, j - 1}, i * mu);
        }
        if(i > 0 || options.source_always_transmits) {
            for(int k = 1; k <= j - i; ++k) {
                add({i + k, j}, epidemic_rate(i, j, k, params));
            }
        }
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(row), -outflow);
    }

    const auto dim = static_cast<Eigen::Index>(space.size());
    SparseRows a(dim, dim);
    a.setFromTriplets(triplets.begin(), triplets.end());
    return RateMatrix(std::move(a));
}

std::vector<bool> reachable_from(const RateMatrix& m, std::size_t start)
{
    std::vector<bool> seen(m.dimension(), false);
    std::deque<std::size_t> queue{start};
    seen.at(start) = true;
    while(!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop_front();
        for(std::size_t next : m.successors(k)) {
            if(!seen[next]) {
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }
    return seen;
}

std::vector<std::vector<std::size_t>> recurrent_classes(const RateMatrix& m)
{
    // Iterative Tarjan.
    const std::size_t n = m.dimension();
    constexpr auto unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), low(n, 0), component(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> adjacency(n);
    for(std::size_t k = 0; k < n; ++k) {
        adjacency[k] = m.successors(k);
    }

    std::vector<std::vector<std::size_t>> components;
    std::size_t counter = 0;
    struct Frame { std::size_t node; std::size_t edge; };
    std::vector<Frame> call;

    for(std::size_t root = 0; root < n; ++root) {
        if(index[root] != unvisited) {
            continue;
        }
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while(!call.empty()) {
            Frame& f = call.back();
            if(f.edge < adjacency[f.node].size()) {
                const std::size_t w = adjacency[f.node][f.edge++];
                if(index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                }
                else if(on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
                continue;
            }
            const std::size_t v = f.node;
            call.pop_back();
            if(!call.empty()) {
                low[call.back().node] = std::min(low[call.back().node], low[v]);
            }
            if(low[v] == index[v]) {
                std::vector<std::size_t> members;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component[w] = components.size();
                    members.push_back(w);
                } while(w != v);
                components.push_back(std::move(members));
            }
        }
    }

    std::vector<std::vector<std::size_t>> closed;
    for(std::size_t c = 0; c < components.size(); ++c) {
        bool leaks = false;
        for(std::size_t v : components[c]) {
            for(std::size_t w : adjacency[v]) {
                leaks = leaks || component[w] != c;
            }
        }
        if(!leaks) {
            std::sort(components[c].begin(), components[c].end());
            closed.push_back(std::move(components[c]));
        }
    }
    std::sort(closed.begin(), closed.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return closed;
}

GeneratorDiagnostics validate_generator(const RateMatrix& m, const StateSpace& space, State start)
{
    GeneratorDiagnostics d;
    d.norm_inf = m.norm_inf();
    const SparseRows& a = m.matrix();
    for(Eigen::Index r = 0; r < a.outerSize(); ++r) {
        double sum = 0;
        for(SparseRows::InnerIterator it(a, r); it; ++it) {
            sum += it.value();
            if(it.col() != r && it.value() < 0) {
                ++d.negative_off_diagonals;
            }
        }
        d.max_row_residual = std::max(d.max_row_residual, std::abs(sum));
    }

    const auto seen = reachable_from(m, space.index_of(start));
    for(std::size_t k = 0; k < seen.size(); ++k) {
        if(!seen[k]) {
            d.unreachable.push_back(space[k]);
        }
    }
    d.recurrent_class_count = recurrent_classes(m).size();
    return d;
}

} // namespace vcons
