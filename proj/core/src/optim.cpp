#include "rgnn/optim.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rgnn/errors.hpp"

namespace rgnn {

void AdamConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("adam: learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("adam: beta1 and beta2 must be in [0,1)");
  if (!(eps >= 0.0)) throw ConfigError("adam: eps must be nonnegative");
  if (!(weight_decay >= 0.0)) throw ConfigError("adam: weight_decay must be nonnegative");
}

AdamState AdamState::zeros_for(const ParamSet& params) {
  return {0, params.zeros_like(), params.zeros_like()};
}

void adam_step(AdamState& state, ParamSet& params, const ParamSet& directions, const AdamConfig& config) {
  params.require_same_shape(directions);
  params.require_same_shape(state.first_moment);
  params.require_same_shape(state.second_moment);

  directions.for_each_tensor([](std::string_view name, std::span<const double> g) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!std::isfinite(g[i]))
        throw NumericError("adam: non-finite update direction in tensor '" + std::string(name) + "' at index " +
                           std::to_string(i));
  });

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  std::vector<std::span<const double>> grads;
  directions.for_each_tensor([&](std::string_view, std::span<const double> g) { grads.push_back(g); });
  std::vector<std::span<double>> m, v;
  state.first_moment.for_each_tensor([&](std::string_view, std::span<double> s) { m.push_back(s); });
  state.second_moment.for_each_tensor([&](std::string_view, std::span<double> s) { v.push_back(s); });

  std::size_t k = 0;
  params.for_each_tensor([&](std::string_view name, std::span<double> p) {
    const bool decay = config.weight_decay > 0.0 && name != "adjacency";
    const auto g = grads[k];
    auto mk = m[k];
    auto vk = v[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      mk[i] = config.beta1 * mk[i] + (1.0 - config.beta1) * g[i];
      vk[i] = config.beta2 * vk[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = mk[i] / correction1;
      const double v_hat = vk[i] / correction2;
      if (decay) p[i] -= config.lr * config.weight_decay * p[i];
      if (m_hat != 0.0) p[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
    ++k;
  });
}

}  // namespace rgnn
