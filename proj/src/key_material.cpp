#include "decorr/key_material.hpp"

#include <nlohmann/json.hpp>

#include "decorr/errors.hpp"

namespace decorr {

void KeyMaterial::check() const {
    if (alpha >= beta) throw CompileError("key material: alpha must be < beta");
    if (flat_size == 0) throw CompileError("key material: empty data section");
    if (sk <= flat_size) throw CompileError("key material: sk must exceed the data section size");
    if (sk < static_cast<uint64_t>(alpha) * flat_size ||
        sk > static_cast<uint64_t>(beta) * flat_size)
        throw CompileError("key material: sk outside [alpha*t, beta*t]");
    if (id_bound <= sk) throw CompileError("key material: id_bound must exceed sk");
    if (page_bits == 0 || page_bits > 16) throw CompileError("key material: bad page_bits");
    if (counter_bits == 0 || counter_bits > 32) throw CompileError("key material: bad counter_bits");
}

nlohmann::json KeyMaterial::to_json() const {
    return {
        {"sk", sk},
        {"alpha", alpha},
        {"beta", beta},
        {"id_bound", id_bound},
        {"perm_seed", perm_seed},
        {"counter_bits", counter_bits},
        {"page_bits", page_bits},
        {"shuffle_period", shuffle_period},
        {"flat_size", flat_size},
    };
}

KeyMaterial KeyMaterial::from_json(const nlohmann::json& j) {
    KeyMaterial k;
    k.sk = j.at("sk").get<uint64_t>();
    k.alpha = j.at("alpha").get<uint32_t>();
    k.beta = j.at("beta").get<uint32_t>();
    k.id_bound = j.at("id_bound").get<uint64_t>();
    k.perm_seed = j.at("perm_seed").get<uint64_t>();
    k.counter_bits = j.at("counter_bits").get<uint32_t>();
    k.page_bits = j.at("page_bits").get<uint32_t>();
    k.shuffle_period = j.at("shuffle_period").get<uint64_t>();
    k.flat_size = j.at("flat_size").get<uint32_t>();
    return k;
}

} // namespace decorr
