#include "model/driving_net.hpp"

#include <cmath>
#include <sstream>

#include "common/error.hpp"

namespace fusiondrive::model {

template <typename T>
DrivingNet<T>::DrivingNet(const ModelConfig& config) : config_(config) {
  config_.validate();
  Rng rng(config_.init_seed);

  encoder_.template add<nn::Conv2d<T>>("stem", config_.input_channels, config_.stem_width, 3, 2, 1, false, rng);
  int channels = config_.stem_width;
  for (int stage = 0; stage < 4; ++stage) {
    const int width = config_.stage_widths[stage];
    for (int b = 0; b < config_.stage_blocks[stage]; ++b) {
      const std::string name = "stage" + std::to_string(stage + 1) + ".block" + std::to_string(b + 1);
      const int stride = b == 0 ? 2 : 1;
      if (config_.bottleneck) {
        encoder_.template add<nn::PreActBottleneck<T>>(name, channels, width, 4 * width, stride, rng);
        channels = 4 * width;
      } else {
        encoder_.template add<nn::PreActBlock<T>>(name, channels, width, stride, rng);
        channels = width;
      }
    }
  }
  encoder_.template add<nn::BatchNorm2d<T>>("encoder.final_bn", channels);
  encoder_.template add<nn::ReLU<T>>();
  latent_channels_ = channels;

  if (config_.use_decoder) {
    decoder_ = std::make_unique<nn::Sequential<T>>();
    int in = channels;
    const size_t layers = config_.decoder_filters.size();
    for (size_t k = 0; k < layers; ++k) {
      const std::string name = "decoder.deconv" + std::to_string(k + 1);
      decoder_->template add<nn::ConvTranspose2d<T>>(name, in, config_.decoder_filters[k],
                                                     config_.decoder_kernel, config_.decoder_strides[k], rng);
      in = config_.decoder_filters[k];
      if (k + 1 < layers) {
        decoder_->template add<nn::BatchNorm2d<T>>("decoder.bn" + std::to_string(k + 1), in);
        decoder_->template add<nn::ReLU<T>>();
      }
    }
    decoder_->template add<nn::ChannelSoftmax<T>>();
  }

  for (int b = 0; b < kNumNavCommands; ++b) {
    int in = channels;
    for (size_t k = 0; k < config_.branch_hidden.size(); ++k) {
      const std::string name = "branch" + std::to_string(b) + ".fc" + std::to_string(k + 1);
      branches_[b].template add<nn::Linear<T>>(name, in, config_.branch_hidden[k], rng);
      branches_[b].template add<nn::ReLU<T>>();
      dropouts_[b].push_back(&branches_[b].template add<nn::Dropout<T>>(config_.dropout));
      in = config_.branch_hidden[k];
    }
    branches_[b].template add<nn::Linear<T>>("branch" + std::to_string(b) + ".out", in, 2, rng);
  }
}

template <typename T>
LatentFeatures<T> DrivingNet<T>::encode(const Tensor<T>& x, bool training) {
  if (x.c != config_.input_channels || x.h != config_.input_size || x.w != config_.input_size)
    throw Error(ErrorCode::kShapeMismatch,
                "model expects (N," + std::to_string(config_.input_channels) + "," +
                    std::to_string(config_.input_size) + "," + std::to_string(config_.input_size) +
                    ") input, got " + x.shape_string());
  LatentFeatures<T> out;
  out.feature_map = encoder_.forward(x, training);
  out.latent = pool_.forward(out.feature_map, training);
  return out;
}

template <typename T>
Tensor<T> DrivingNet<T>::decode(const Tensor<T>& feature_map, bool training) {
  if (!decoder_) throw Error(ErrorCode::kConfig, "model has no scene decoder");
  return decoder_->forward(feature_map, training);
}

template <typename T>
Tensor<T> DrivingNet<T>::policy(const Tensor<T>& latent, std::span<const NavCommand> commands, bool training) {
  if (static_cast<int>(commands.size()) != latent.n)
    throw Error(ErrorCode::kShapeMismatch, "one command per sample is required");
  for (auto& g : groups_) g.clear();
  for (int i = 0; i < latent.n; ++i) {
    const int b = static_cast<int>(commands[i]);
    if (b < 0 || b >= kNumNavCommands) throw Error(ErrorCode::kUnknownCommand, "unknown navigation command");
    groups_[b].push_back(i);
  }
  batch_ = latent.n;
  controls_ = Tensor<T>(latent.n, 2);
  const int c = latent.c;
  for (int b = 0; b < kNumNavCommands; ++b) {
    const auto& rows = groups_[b];
    if (rows.empty()) continue;
    Tensor<T> sub(static_cast<int>(rows.size()), c);
    for (size_t r = 0; r < rows.size(); ++r)
      std::copy_n(latent.image(rows[r]), c, sub.image(static_cast<int>(r)));
    const Tensor<T> raw = branches_[b].forward(sub, training);
    for (size_t r = 0; r < rows.size(); ++r) {
      controls_.at(rows[r], 0) = std::tanh(raw.at(static_cast<int>(r), 0));
      controls_.at(rows[r], 1) = T(1) / (T(1) + std::exp(-raw.at(static_cast<int>(r), 1)));
    }
  }
  return controls_;
}

template <typename T>
NetOutput<T> DrivingNet<T>::forward(const Tensor<T>& x, std::span<const NavCommand> commands, bool training) {
  LatentFeatures<T> f = encode(x, training);
  NetOutput<T> out;
  forward_had_decoder_ = decoder_ != nullptr;
  if (decoder_) out.semantics = decoder_->forward(f.feature_map, training);
  out.controls = policy(f.latent, commands, training);
  return out;
}

template <typename T>
void DrivingNet<T>::backward(const Tensor<T>* d_semantics, const Tensor<T>& d_controls) {
  if (d_controls.n != batch_ || d_controls.image_size() != 2)
    throw Error(ErrorCode::kShapeMismatch, "control gradient shape " + d_controls.shape_string());
  Tensor<T> d_latent(batch_, latent_channels_);
  for (int b = 0; b < kNumNavCommands; ++b) {
    const auto& rows = groups_[b];
    if (rows.empty()) continue;
    Tensor<T> d_raw(static_cast<int>(rows.size()), 2);
    for (size_t r = 0; r < rows.size(); ++r) {
      const T steer = controls_.at(rows[r], 0);
      const T speed = controls_.at(rows[r], 1);
      d_raw.at(static_cast<int>(r), 0) = d_controls.at(rows[r], 0) * (T(1) - steer * steer);
      d_raw.at(static_cast<int>(r), 1) = d_controls.at(rows[r], 1) * speed * (T(1) - speed);
    }
    const Tensor<T> d_sub = branches_[b].backward(d_raw);
    for (size_t r = 0; r < rows.size(); ++r)
      std::copy_n(d_sub.image(static_cast<int>(r)), latent_channels_, d_latent.image(rows[r]));
  }
  Tensor<T> d_features = pool_.backward(d_latent);
  if (d_semantics && forward_had_decoder_) {
    const Tensor<T> d_dec = decoder_->backward(*d_semantics);
    for (size_t i = 0; i < d_features.data.size(); ++i) d_features.data[i] += d_dec.data[i];
  }
  encoder_.backward(d_features);
}

template <typename T>
std::vector<nn::Param<T>*> DrivingNet<T>::parameters() {
  std::vector<nn::Param<T>*> params;
  std::vector<nn::Buffer<T>> buffers;
  encoder_.collect(params, buffers);
  if (decoder_) decoder_->collect(params, buffers);
  for (auto& b : branches_) b.collect(params, buffers);
  return params;
}

template <typename T>
std::vector<nn::Buffer<T>> DrivingNet<T>::buffers() {
  std::vector<nn::Param<T>*> params;
  std::vector<nn::Buffer<T>> buffers;
  encoder_.collect(params, buffers);
  if (decoder_) decoder_->collect(params, buffers);
  for (auto& b : branches_) b.collect(params, buffers);
  return buffers;
}

template <typename T>
std::vector<nn::Param<T>*> DrivingNet<T>::branch_parameters(int branch) {
  std::vector<nn::Param<T>*> params;
  std::vector<nn::Buffer<T>> buffers;
  branches_.at(static_cast<size_t>(branch)).collect(params, buffers);
  return params;
}

template <typename T>
std::vector<nn::Param<T>*> DrivingNet<T>::decoder_parameters() {
  std::vector<nn::Param<T>*> params;
  std::vector<nn::Buffer<T>> buffers;
  if (decoder_) decoder_->collect(params, buffers);
  return params;
}

template <typename T>
void DrivingNet<T>::zero_grad() {
  for (nn::Param<T>* p : parameters()) p->grad.fill(T(0));
}

template <typename T>
size_t DrivingNet<T>::parameter_count() {
  size_t n = 0;
  for (nn::Param<T>* p : parameters()) n += p->value.size();
  return n;
}

template <typename T>
std::string DrivingNet<T>::summary() {
  auto count = [](nn::Module<T>& m) {
    std::vector<nn::Param<T>*> params;
    std::vector<nn::Buffer<T>> buffers;
    m.collect(params, buffers);
    size_t n = 0;
    for (auto* p : params) n += p->value.size();
    return n;
  };
  std::ostringstream os;
  const int s = config_.input_size;
  os << "input      (" << config_.input_channels << ", " << s << ", " << s << ")\n";
  os << "encoder    " << count(encoder_) << " params, feature map (" << latent_channels_ << ", " << s / 32
     << ", " << s / 32 << ")\n";
  for (const auto& layer : encoder_.layers()) os << "  " << layer->describe() << '\n';
  if (decoder_) {
    os << "decoder    " << count(*decoder_) << " params, output (" << config_.n_classes << ", " << s << ", " << s
       << ")\n";
    for (const auto& layer : decoder_->layers()) os << "  " << layer->describe() << '\n';
  } else {
    os << "decoder    none\n";
  }
  for (int b = 0; b < kNumNavCommands; ++b)
    os << "branch " << b << " (" << to_string(static_cast<NavCommand>(b)) << ") " << count(branches_[b])
       << " params: " << branches_[b].describe() << '\n';
  os << "total      " << parameter_count() << " params\n";
  return os.str();
}

template <typename T>
void DrivingNet<T>::reseed_dropout(uint64_t seed) {
  for (int b = 0; b < kNumNavCommands; ++b)
    for (size_t k = 0; k < dropouts_[b].size(); ++k)
      dropouts_[b][k]->reseed(mix_seed(seed, static_cast<uint64_t>(b), k));
}

template class DrivingNet<float>;
template class DrivingNet<double>;

}  // namespace fusiondrive::model
