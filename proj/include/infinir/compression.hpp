#pragma once

#include <string>
#include <vector>

#include "infinir/proof.hpp"

namespace infinir {

/// Regular presentation of a reduction of length at most omega: a finite head
/// reduction at this level, then per-argument descent. Cycles denote omega.
struct OredNode {
  FiniteReduction head;
  static constexpr int kStop = -1;
  std::vector<int> children;  // node index per argument, or kStop
};

struct OredCertificate {
  std::vector<OredNode> nodes;
  int root = 0;
  RationalTerm source;
  RationalTerm target;
};

/// Compression of a valid IRED certificate over a left-linear TRS into an
/// OredCertificate with the same endpoints. Throws NotLeftLinear,
/// InvalidCertificate or CompressionFailed.
OredCertificate compress(const ProofGraph& p, const Trs& trs);

struct StepStream {
  RationalTerm start;
  std::vector<Step> steps;
  std::vector<int> level;  // emitting level per step
};

/// First k steps of the denoted reduction under the canonical interleaving:
/// level-0 head first, then level-1 heads left to right, and so on.
StepStream emit_steps(const OredCertificate& o, int k);

ValidationReport validate_ored(const OredCertificate& o, const Trs& trs, int depth);

std::string ored_to_json(const OredCertificate& o);
OredCertificate ored_from_json(const std::string& text, const Signature& sig);

}  // namespace infinir
