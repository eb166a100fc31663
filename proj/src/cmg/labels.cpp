/*
 * Copyright (c) the cmgrasp authors.
 *
 * This source code is licensed under the Apache License, Version 2.0
 * found in the LICENSE file in the root directory of this source tree.
 */

#include "cmg/labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmg/error.hpp"
#include "cmg/parallel.hpp"

namespace cmg {

int binIndex(const BinSpec& spec, double theta) {
  if (spec.bins < 1 || !(spec.hi > spec.lo))
    throw Error(ErrorCode::kInvalidArg, "binIndex: bad bin spec");
  int bin = static_cast<int>(std::floor((theta - spec.lo) / spec.width()));
  return std::clamp(bin, 0, spec.bins - 1);
}

double binResidual(const BinSpec& spec, double theta) {
  double w = spec.width();
  int bin = binIndex(spec, theta);
  return ((theta - spec.lo) - (bin * w + w / 2.0)) / w;
}

double binDecode(const BinSpec& spec, int bin, double residual) {
  if (bin < 0 || bin >= spec.bins) throw Error(ErrorCode::kInvalidArg, "binDecode: bad bin");
  return spec.lo + spec.width() * (bin + 0.5 + residual);
}

LabelParams LabelParams::forHand(const HandModel& hand) {
  LabelParams p;
  p.mainBins = {hand.innerMin, hand.innerMax, 12};
  p.spreadBins = {hand.spreadMin, hand.spreadMax, 12};
  p.supportBins = {hand.innerMin, hand.innerMax, 8};
  return p;
}

std::vector<PointLabel> labelPoints(const PointCloud& cloud,
                                    const std::vector<GraspRecord>& grasps,
                                    const LabelParams& params) {
  std::vector<PointLabel> labels(cloud.size());
  double cosMax = std::cos(params.normalAngleMax);
  double r2 = params.contactRadius * params.contactRadius;

  parallelFor(cloud.size(), [&](std::size_t i) {
    const OrientedPoint& point = cloud[i];
    double bestD2 = std::numeric_limits<double>::infinity();
    int bestGrasp = -1, bestFinger = -1;
    for (std::size_t g = 0; g < grasps.size(); ++g) {
      for (int f = 0; f < 3; ++f) {
        const OrientedPoint& contact = grasps[g].contacts[f];
        double d2 = norm2(point.position - contact.position);
        if (d2 > r2 || d2 >= bestD2) continue;
        if (dot(normalized(point.normal), normalized(contact.normal)) < cosMax) continue;
        bestD2 = d2;
        bestGrasp = static_cast<int>(g);
        bestFinger = f;
      }
    }
    PointLabel label;
    if (bestGrasp >= 0) {
      const GraspRecord& grasp = grasps[bestGrasp];
      label.contact = 1;
      label.finger = static_cast<std::uint8_t>(bestFinger + 1);
      label.x = static_cast<float>(grasp.x[bestFinger]);
      label.y = static_cast<float>(grasp.y[bestFinger]);
      double support[2];
      int k = 0;
      for (int f = 0; f < 3; ++f)
        if (f != bestFinger) support[k++] = grasp.inner[f];
      const double values[4] = {grasp.inner[bestFinger], grasp.spread, support[0], support[1]};
      const BinSpec* specs[4] = {&params.mainBins, &params.spreadBins, &params.supportBins,
                                 &params.supportBins};
      for (int j = 0; j < 4; ++j) {
        label.bins[j] = static_cast<std::uint16_t>(binIndex(*specs[j], values[j]));
        label.res[j] = static_cast<float>(binResidual(*specs[j], values[j]));
      }
    }
    labels[i] = label;
  });
  return labels;
}

double crossEntropy(const std::vector<double>& probs, int target) {
  if (target < 0 || target >= static_cast<int>(probs.size()))
    throw Error(ErrorCode::kInvalidArg, "crossEntropy: target out of range");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw Error(ErrorCode::kInvalidArg, "crossEntropy: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw Error(ErrorCode::kInvalidArg, "crossEntropy: probabilities do not sum to 1");
  return -std::log(std::max(probs[target], 1e-300));
}

double smoothL1(double error) {
  double a = std::abs(error);
  return a < 1.0 ? 0.5 * error * error : a - 0.5;
}

LossBreakdown evaluateLoss(const std::vector<PointPrediction>& predictions,
                           const std::vector<PointLabel>& labels, const LabelParams& params,
                           const LossWeights& weights) {
  if (predictions.size() != labels.size())
    throw Error(ErrorCode::kInvalidArg, "evaluateLoss: size mismatch");
  if (predictions.empty()) throw Error(ErrorCode::kInvalidArg, "evaluateLoss: empty input");

  LossBreakdown out;
  std::size_t contacts = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const PointPrediction& pred = predictions[i];
    const PointLabel& label = labels[i];
    out.graspable +=
        crossEntropy({pred.graspable[0], pred.graspable[1]}, label.contact ? 1 : 0);
    if (!label.contact) continue;
    ++contacts;
    double dx = pred.x - label.x, dy = pred.y - label.y;
    out.direction += std::sqrt(dx * dx + dy * dy);

    struct Term {
      const std::vector<double>* probs;
      double res;
      const BinSpec* spec;
      double* accum;
    };
    const Term terms[4] = {
        {&pred.mainProbs, pred.mainRes, &params.mainBins, &out.main},
        {&pred.spreadProbs, pred.spreadRes, &params.spreadBins, &out.spread},
        {&pred.support1Probs, pred.support1Res, &params.supportBins, &out.support1},
        {&pred.support2Probs, pred.support2Res, &params.supportBins, &out.support2},
    };
    for (int j = 0; j < 4; ++j) {
      if (static_cast<int>(terms[j].probs->size()) != terms[j].spec->bins)
        throw Error(ErrorCode::kInvalidArg, "evaluateLoss: distribution size mismatch");
      *terms[j].accum += crossEntropy(*terms[j].probs, label.bins[j]) +
                         smoothL1(terms[j].res - label.res[j]);
    }
  }

  out.graspable /= static_cast<double>(predictions.size());
  if (contacts > 0) {
    double inv = 1.0 / static_cast<double>(contacts);
    out.direction *= inv;
    out.main *= inv;
    out.spread *= inv;
    out.support1 *= inv;
    out.support2 *= inv;
  }
  double support = out.support1 + out.support2;
  out.total = weights.alpha * out.graspable + weights.beta * out.direction +
              weights.gamma * (weights.gamma1 * out.main + weights.gamma2 * out.spread +
                               weights.gamma3 * support);
  return out;
}

}  // namespace cmg
