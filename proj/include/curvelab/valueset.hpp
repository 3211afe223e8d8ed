#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace curvelab {

// A point of ZZ^r (componentwise partial order throughout).
using ValueVector = std::vector<long long>;

bool vv_leq(const ValueVector& a, const ValueVector& b);
ValueVector vv_min(const ValueVector& a, const ValueVector& b);
ValueVector vv_add(const ValueVector& a, const ValueVector& b);
std::string vv_to_string(const ValueVector& a);

// A subset of ZZ^r stored exactly on a box plus a cofinite-tail certificate:
// every point >= tail_conductor belongs to the set.  All queries stay inside
// box-or-tail; anything else is a caller bug and throws OutOfBox.
struct BoxedValueSet {
    unsigned r = 1;
    ValueVector box_min, box_max;
    ValueVector tail_conductor;
    std::vector<char> bits; // row-major, first coordinate most significant

    static BoxedValueSet from_members(unsigned r, ValueVector box_min, ValueVector box_max,
                                      ValueVector tail_conductor, std::vector<char> bits);
    // { beta : beta >= corner } on the given box.
    static BoxedValueSet up_set(ValueVector box_min, ValueVector box_max, const ValueVector& corner);

    size_t volume() const;
    size_t index(const ValueVector& a) const;
    bool in_box(const ValueVector& a) const;
    bool member(const ValueVector& a) const; // requires in_box
    // Total membership: tail first, then the bitmap; OutOfBox elsewhere.
    bool contains(const ValueVector& a) const;
    ValueVector min_element() const;
    uint64_t box_member_count() const;
};

enum class FiberClass { Empty, Nonempty, Infinite };

// Classification of F_J(E, alpha) = { beta in E : beta_j = alpha_j for j in J,
// beta_i > alpha_i otherwise }.  Infinite means the closed fiber reaches the
// tail region in the complementary coordinates.
FiberClass fiber(const BoxedValueSet& e, const ValueVector& alpha, const std::vector<unsigned>& J);

// Unique minimal gamma with gamma + N^r contained in the set.
ValueVector conductor(const BoxedValueSet& e);

struct MaximalsReport {
    std::vector<ValueVector> maximals, relative_maximals, absolute_maximals;
};
MaximalsReport maximals(const BoxedValueSet& e);

// Length of a saturated chain from a to b inside the set; well defined by the
// equal-length theorem.  Greedy steps go to the lexicographically smallest
// minimal member of the half-open interval.
uint64_t chain_distance(const BoxedValueSet& e, const ValueVector& a, const ValueVector& b);

// d(E1 \ E2) = d_{E1}(min E1, c_{E2}) - d_{E2}(min E2, c_{E2});
// requires E2 subset of E1 (verified pointwise on E2's box).
uint64_t distance_diff(const BoxedValueSet& e1, const BoxedValueSet& e2);

// sum_i (gamma_i - min_i - gaps_i - theta_i) where gaps_i counts
// (N + min_i) \ pr_i(E); gamma must dominate the conductor.
uint64_t gh_colength(const BoxedValueSet& e, const ValueVector& gamma, const std::vector<uint64_t>& theta);

// Copy with one extra member (box must contain it).
BoxedValueSet with_member(const BoxedValueSet& e, const ValueVector& a);

// Coordinate projection as an r=1 set (faithful: the box sees every
// projection value below the tail because the set is min-closed).
BoxedValueSet project_r1(const BoxedValueSet& e, unsigned i);

// #(A \ B) for r=1 sets agreeing above both tails.
uint64_t count_difference_r1(const BoxedValueSet& a, const BoxedValueSet& b);

bool same_members(const BoxedValueSet& a, const BoxedValueSet& b);

std::string valueset_to_json(const BoxedValueSet& e);

} // namespace curvelab
