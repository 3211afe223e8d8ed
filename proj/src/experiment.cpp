#include "curvelab/experiment.hpp"

#include <algorithm>
#include <numeric>

#include "curvelab/errors.hpp"
#include "curvelab/invariants.hpp"
#include "curvelab/oracle.hpp"

namespace curvelab {

namespace {

// Small integer draw; all randomness flows through the family stream so runs
// are reproducible from the seed alone.
int draw_coeff(std::mt19937_64& rng) { return static_cast<int>(rng() % 9) - 4; }

int draw_nonzero(std::mt19937_64& rng) {
    int v;
    do v = draw_coeff(rng);
    while (v == 0);
    return v;
}

struct ClassData {
    std::vector<std::uint64_t> beta; // characteristic exponents
    std::vector<std::uint64_t> e;    // gcd chain
    std::uint64_t boundary = 0;      // n_g * beta_bar_g, 0 for smooth
    std::uint64_t conductor = 0;
};

ClassData class_data(const std::vector<std::uint64_t>& gens) {
    ClassData cd;
    cd.beta = exponents_from_generators(gens);
    cd.e.assign(1, cd.beta[0]);
    for (std::size_t j = 1; j < cd.beta.size(); ++j)
        cd.e.push_back(std::gcd(cd.e.back(), cd.beta[j]));
    const std::size_t g = cd.beta.size() - 1;
    if (g > 0) {
        cd.boundary = cd.e[g - 1] * gens[g];
        std::uint64_t c = 0;
        for (std::size_t j = 1; j <= g; ++j) c += (cd.e[j - 1] / cd.e[j] - 1) * gens[j];
        cd.conductor = c + 1 - cd.beta[0];
    }
    return cd;
}

// Exponents keeping the branch in the class: below the next characteristic
// exponent only multiples of the current gcd, everything above the last one.
bool allowed_exponent(const ClassData& cd, std::uint64_t e) {
    std::size_t j = 0;
    while (j + 1 < cd.beta.size() && cd.beta[j + 1] <= e) ++j;
    if (j + 1 == cd.beta.size()) return true;
    return e % cd.e[j] == 0;
}

bool is_char_exponent(const ClassData& cd, std::uint64_t e) {
    return std::find(cd.beta.begin() + 1, cd.beta.end(), e) != cd.beta.end();
}

Parametrization branch_from_class(const ClassData& cd, unsigned upto, std::mt19937_64& rng) {
    const unsigned n = static_cast<unsigned>(cd.beta[0]);
    std::vector<std::pair<unsigned, Rat>> terms;
    for (std::uint64_t e = n; e <= upto; ++e) {
        if (is_char_exponent(cd, e))
            terms.emplace_back(static_cast<unsigned>(e), Rat(draw_nonzero(rng)));
        else if (allowed_exponent(cd, e)) {
            const int v = draw_coeff(rng);
            if (v) terms.emplace_back(static_cast<unsigned>(e), Rat(v));
        }
    }
    return make_parametrization(n, terms);
}

} // namespace

std::vector<std::uint64_t> exponents_from_generators(const std::vector<std::uint64_t>& gens) {
    if (gens.empty()) throw Error("experiment family needs semigroup generators");
    if (gens.size() == 1) {
        if (gens[0] != 1) throw Error("a single generator must be 1 (smooth branch)");
        return {1};
    }
    std::vector<std::uint64_t> beta{gens[0], gens[1]};
    if (gens[0] < 2 || gens[1] <= gens[0])
        throw Error("semigroup generators must be increasing with multiplicity at least 2");
    const std::uint64_t e1 = std::gcd(gens[0], gens[1]);
    if (e1 == gens[0]) throw Error("second generator must not be a multiple of the first");
    // Recurrence: beta_j = gen_j - n_{j-1} gen_{j-1} + beta_{j-1}, with
    // n_{j-1} = e_{j-2} / e_{j-1} read off the running gcd chain.
    std::vector<std::uint64_t> chain{gens[0], e1};
    for (std::size_t j = 2; j < gens.size(); ++j) {
        const std::uint64_t n_prev = chain[j - 2] / chain[j - 1];
        if (gens[j] <= n_prev * gens[j - 1])
            throw Error("generators violate the plane-branch growth condition");
        const std::uint64_t bj = gens[j] - n_prev * gens[j - 1] + beta[j - 1];
        const std::uint64_t ej = std::gcd(chain[j - 1], bj);
        if (ej == chain[j - 1]) throw Error("generator does not refine the gcd chain");
        beta.push_back(bj);
        chain.push_back(ej);
    }
    if (chain.back() != 1) throw Error("gcd chain of the generators does not reach 1");
    return beta;
}

Parametrization random_branch(const std::vector<std::uint64_t>& gens, unsigned upto,
                              std::mt19937_64& rng) {
    return branch_from_class(class_data(gens), upto, rng);
}

std::pair<Parametrization, Parametrization> random_pair(const std::vector<std::uint64_t>& gens,
                                                        std::uint64_t target,
                                                        std::mt19937_64& rng) {
    const ClassData cd = class_data(gens);
    const std::size_t g = cd.beta.size() - 1;
    const std::uint64_t beta_g = cd.beta[g];
    std::uint64_t k;
    if (g == 0) {
        if (target < 1) throw Error("intersection target below the equisingular floor");
        k = target;
    } else {
        if (target < cd.boundary) throw Error("intersection target below the equisingular floor");
        k = target - (cd.boundary - beta_g);
    }
    const unsigned upto = static_cast<unsigned>(k) + 3;
    Parametrization p1 = branch_from_class(cd, upto, rng);

    const Rat c1 = k < p1.y.c.size() ? p1.y.c[k] : Rat(0);
    std::vector<std::pair<unsigned, Rat>> terms;
    for (std::uint64_t e = cd.beta[0]; e <= upto; ++e) {
        if (e < k) {
            if (e < p1.y.c.size() && !(p1.y.c[e] == 0))
                terms.emplace_back(static_cast<unsigned>(e), p1.y.c[e]);
        } else if (e == k) {
            Rat c2;
            do
                c2 = Rat(k == beta_g && g > 0 ? draw_nonzero(rng) : draw_coeff(rng));
            while (c2 == c1);
            if (!(c2 == 0)) terms.emplace_back(static_cast<unsigned>(e), c2);
        } else if (is_char_exponent(cd, e)) {
            terms.emplace_back(static_cast<unsigned>(e), Rat(draw_nonzero(rng)));
        } else if (allowed_exponent(cd, e)) {
            const int v = draw_coeff(rng);
            if (v) terms.emplace_back(static_cast<unsigned>(e), Rat(v));
        }
    }
    Parametrization p2 = make_parametrization(static_cast<unsigned>(cd.beta[0]), terms);

    auto dc = diagonal_check(p1, p2);
    if (!dc.equisingular) throw Error("generated pair left the equisingularity class");
    if (dc.intersection != target)
        throw Error("generated pair realized intersection " + std::to_string(dc.intersection) +
                    " instead of " + std::to_string(target));
    return {p1, p2};
}

ExperimentResult run_experiment(const ExperimentFamily& fam, std::uint64_t seed, bool oracle) {
    if (fam.targets.empty()) throw Error("experiment family needs at least one target");
    if (fam.samples == 0) throw Error("experiment family needs at least one sample");
    const ClassData cls = class_data(fam.generators);
    std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4full);

    ExperimentResult out;
    std::uint64_t counter = 0;
    for (std::uint64_t target : fam.targets) {
        ExperimentSummary sum;
        sum.target = target;
        sum.reference = 2 * target + cls.conductor;
        for (unsigned s = 0; s < fam.samples; ++s) {
            ++counter;
            ExperimentRow row;
            row.target = target;
            row.instance = static_cast<unsigned>(counter);
            std::string last;
            std::pair<Parametrization, Parametrization> pair;
            const unsigned tries = std::max(1u, fam.retries);
            for (unsigned a = 0; a < tries && !row.generated; ++a) {
                try {
                    pair = random_pair(fam.generators, target, rng);
                    row.generated = true;
                } catch (const Error& err) {
                    last = err.what();
                }
            }
            if (!row.generated) {
                row.failure = last;
                out.rows.push_back(std::move(row));
                continue;
            }
            const CurveData cd = curve_data({pair.first, pair.second});
            row.intersection = cd.inter[0][1];
            row.tau_berger = tjurina_berger(cd, seed + 1000 * counter);
            if (oracle) {
                CurveSpec spec = spec_from_branches({pair.first, pair.second});
                if (spec.product)
                    row.tau_oracle = tjurina_oracle(*spec.product, seed + 1000 * counter + 500);
            }
            if (!sum.any || row.tau_berger < sum.min_tau) {
                sum.any = true;
                sum.min_tau = row.tau_berger;
            }
            out.rows.push_back(std::move(row));
        }
        out.summaries.push_back(sum);
    }
    return out;
}

} // namespace curvelab
