#include "trw/latent_codec.hpp"

// Template definitions live in the header; this translation unit anchors the
// common instantiations.

namespace trw {

template struct LatentVideo<float>;
template struct LatentVideo<double>;

template LatentVideo<float> encode<float>(const Tensor<float>&, int);
template LatentVideo<double> encode<double>(const Tensor<double>&, int);
template Tensor<float> decode<float>(const LatentVideo<float>&);
template Tensor<double> decode<double>(const LatentVideo<double>&);
template Tensor<float> space_to_depth<float>(const Tensor<float>&, int);
template Tensor<double> space_to_depth<double>(const Tensor<double>&, int);

}  // namespace trw
