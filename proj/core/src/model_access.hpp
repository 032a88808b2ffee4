#pragma once

#include "gazescreen/model.hpp"
#include "nn/layers.hpp"

namespace gazescreen {

// Library-internal access to the network behind a ResidualClassifier.
class ModelAccess {
public:
    static nn::ParamList& params(ResidualClassifier& m);
    static const nn::ParamList& params(const ResidualClassifier& m);
    static nn::ResNet& net(ResidualClassifier& m);
    static double loss(const ResidualClassifier& m, const Tensor& batch, const std::vector<int>& labels, BnMode mode);
};

}  // namespace gazescreen
