#pragma once

#include <cstdint>
#include <string>

#include "ace/config.hpp"

namespace ace::models {

// Model constants; defaults reproduce the published comparison tables.
// "KB" in emitted tables means 1000 bytes throughout.
struct CostModelParams {
    double t_sig_cpu_us = 76.0;    // Ed25519 verify, CPU
    double t_sig_gpu_us = 2.0;     // Ed25519 verify, GPU batch
    double t_ecdsa_us = 50.0;      // secp256k1 verify
    double t_mldsa_us = 200.0;     // ML-DSA-44 verify
    double t_groth16_verify_ms = 0.5;
    std::uint64_t solana_tx_bytes = 1232;
    std::uint64_t ace_tx_bytes = 244;
    std::uint64_t witness_bundle_bytes = 400;
    double bandwidth_bytes_per_s = 125e6;  // 1 Gbps
    std::uint64_t sig_bytes = 64;
    std::uint64_t pubkey_bytes = 32;
    std::uint64_t mldsa_auth_bytes = 3732;
    std::uint64_t fc_wire_bytes = 328;
    std::uint64_t fc_proof_bytes = 256;
    std::uint64_t ace_header_bytes = 256;
    std::uint64_t ace_payload_bytes = 154;
    std::uint64_t ace_attestation_bytes = 90;

    static CostModelParams from_kv(const config::KvMap& kv);
};

enum class System { SolanaCpu, SolanaGpu, Ace };
enum class AuthScheme { Ed25519, MlDsa, ZkAce };

double verify_time_ms(System sys, std::uint64_t n_txs, const CostModelParams& p = {});

std::uint64_t bandwidth_tps(System sys, const CostModelParams& p = {});
std::uint64_t bandwidth_tps_ace_combined(const CostModelParams& p = {});

std::uint64_t auth_data_per_block_bytes(AuthScheme scheme, std::uint64_t n_txs,
                                        const CostModelParams& p = {});

std::uint64_t block_bytes_ace(std::uint64_t n_txs, const CostModelParams& p = {});
std::uint64_t block_bytes_solana(std::uint64_t n_txs, const CostModelParams& p = {});

std::uint64_t round_to_thousand(std::uint64_t v);

// Table renderers; CSV output is byte-stable and matched against goldens.
std::string table5_csv(const CostModelParams& p = {});
std::string table5_text(const CostModelParams& p = {});
std::string table6_csv(const CostModelParams& p = {});
std::string table6_text(const CostModelParams& p = {});
std::string table7_csv();
std::string table7_text();
std::string table8_csv();
std::string table8_text();
std::string tps_csv(const CostModelParams& p = {});
std::string tps_text(const CostModelParams& p = {});

// Writes every table as .csv and .txt under `dir`. Returns false on I/O error.
bool write_tables(const std::string& dir, const CostModelParams& p = {});

}  // namespace ace::models
