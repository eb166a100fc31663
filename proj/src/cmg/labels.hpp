/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cmg/mesh.hpp"
#include "cmg/synth.hpp"

namespace cmg {

// Uniform discretization of [lo, hi) into bins of width (hi - lo) / bins.
// Values are encoded as a bin index plus a residual in [-0.5, 0.5) measured
// from the bin center in units of the bin width, so decoding is exact.
struct BinSpec {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 1;

  double width() const { return (hi - lo) / bins; }
};

int binIndex(const BinSpec& spec, double theta);
double binResidual(const BinSpec& spec, double theta);
double binDecode(const BinSpec& spec, int bin, double residual);

struct LabelParams {
  double contactRadius = 0.005;
  double normalAngleMax = M_PI / 6.0;
  BinSpec mainBins;     // contact finger's inner joint
  BinSpec spreadBins;   // shared spread joint
  BinSpec supportBins;  // the two support fingers' inner joints

  // Defaults sized to the hand's joint ranges.
  static LabelParams forHand(const HandModel& hand);
};

// Per-point training target. Fingers are 1-based with 0 meaning "no
// contact"; joint codes are ordered: contact finger inner, spread, support
// fingers by ascending id. Non-contact points carry the sentinel bins 0xFFFF
// with zero residuals.
struct PointLabel {
  std::uint8_t contact = 0;
  std::uint8_t finger = 0;
  float x = 0.0f, y = 0.0f;
  std::array<std::uint16_t, 4> bins{0xFFFF, 0xFFFF, 0xFFFF, 0xFFFF};
  std::array<float, 4> res{0.0f, 0.0f, 0.0f, 0.0f};
};

// Matches every cloud point against the grasp contacts: a point inherits the
// closest contact within the radius whose normal agrees within the angle
// gate. Ties break by grasp row order, then finger id.
std::vector<PointLabel> labelPoints(const PointCloud& cloud,
                                    const std::vector<GraspRecord>& grasps,
                                    const LabelParams& params);

// Training-objective evaluation for a labeled cloud. Predictions hold class
// probabilities (validated to sum to 1) and scalar regressions; the residual
// entries are the predictions evaluated at the true bin.
struct PointPrediction {
  std::array<double, 2> graspable{0.5, 0.5};  // P(no contact), P(contact)
  double x = 0.0, y = 0.0;
  std::vector<double> mainProbs, spreadProbs, support1Probs, support2Probs;
  double mainRes = 0.0, spreadRes = 0.0, support1Res = 0.0, support2Res = 0.0;
};

struct LossWeights {
  double alpha = 1.0;   // graspable classification
  double beta = 5.0;    // contact direction regression
  double gamma = 5.0;   // joint terms overall
  double gamma1 = 1.0;  // contact finger inner
  double gamma2 = 1.0;  // spread
  double gamma3 = 1.0;  // support fingers
};

struct LossBreakdown {
  double graspable = 0.0;
  double direction = 0.0;
  double main = 0.0;
  double spread = 0.0;
  double support1 = 0.0;
  double support2 = 0.0;
  double total = 0.0;
};

double crossEntropy(const std::vector<double>& probs, int target);
double smoothL1(double error);

LossBreakdown evaluateLoss(const std::vector<PointPrediction>& predictions,
                           const std::vector<PointLabel>& labels, const LabelParams& params,
                           const LossWeights& weights);

}  // namespace cmg
