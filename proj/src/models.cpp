#include "ace/models.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ace::models {

namespace {

// Integer-valued doubles print without a decimal point; 0.5 prints as "0.5".
std::string fmt_num(double v, int max_decimals = 3) {
    double rounded = std::llround(v);
    if (std::abs(v - rounded) < 1e-9) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", std::llround(v));
        return buf;
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", max_decimals, v);
    std::string s = buf;
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

std::string fmt_fixed(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

}  // namespace

CostModelParams CostModelParams::from_kv(const config::KvMap& kv) {
    CostModelParams p;
    auto d = [&](const char* key, double& field) {
        if (auto v = config::get_double(kv, key)) field = *v;
    };
    auto u = [&](const char* key, std::uint64_t& field) {
        if (auto v = config::get_u64(kv, key)) field = *v;
    };
    d("t_sig_cpu_us", p.t_sig_cpu_us);
    d("t_sig_gpu_us", p.t_sig_gpu_us);
    d("t_ecdsa_us", p.t_ecdsa_us);
    d("t_mldsa_us", p.t_mldsa_us);
    d("t_groth16_verify_ms", p.t_groth16_verify_ms);
    d("bandwidth_bytes_per_s", p.bandwidth_bytes_per_s);
    u("solana_tx_bytes", p.solana_tx_bytes);
    u("ace_tx_bytes", p.ace_tx_bytes);
    u("witness_bundle_bytes", p.witness_bundle_bytes);
    u("sig_bytes", p.sig_bytes);
    u("pubkey_bytes", p.pubkey_bytes);
    u("mldsa_auth_bytes", p.mldsa_auth_bytes);
    u("fc_wire_bytes", p.fc_wire_bytes);
    u("fc_proof_bytes", p.fc_proof_bytes);
    u("ace_header_bytes", p.ace_header_bytes);
    u("ace_payload_bytes", p.ace_payload_bytes);
    u("ace_attestation_bytes", p.ace_attestation_bytes);
    return p;
}

double verify_time_ms(System sys, std::uint64_t n_txs, const CostModelParams& p) {
    switch (sys) {
        case System::SolanaCpu:
            return static_cast<double>(n_txs) * p.t_sig_cpu_us / 1000.0;
        case System::SolanaGpu:
            return static_cast<double>(n_txs) * p.t_sig_gpu_us / 1000.0;
        case System::Ace:
            return p.t_groth16_verify_ms;
    }
    return 0;
}

std::uint64_t bandwidth_tps(System sys, const CostModelParams& p) {
    std::uint64_t per_tx = sys == System::Ace ? p.ace_tx_bytes : p.solana_tx_bytes;
    return static_cast<std::uint64_t>(p.bandwidth_bytes_per_s / static_cast<double>(per_tx));
}

std::uint64_t bandwidth_tps_ace_combined(const CostModelParams& p) {
    std::uint64_t per_tx = p.ace_tx_bytes + p.witness_bundle_bytes;
    return static_cast<std::uint64_t>(p.bandwidth_bytes_per_s / static_cast<double>(per_tx));
}

std::uint64_t auth_data_per_block_bytes(AuthScheme scheme, std::uint64_t n_txs,
                                        const CostModelParams& p) {
    switch (scheme) {
        case AuthScheme::Ed25519:
            return n_txs * (p.sig_bytes + p.pubkey_bytes);
        case AuthScheme::MlDsa:
            return n_txs * p.mldsa_auth_bytes;
        case AuthScheme::ZkAce:
            return p.fc_proof_bytes;  // one aggregated proof per block
    }
    return 0;
}

std::uint64_t block_bytes_ace(std::uint64_t n_txs, const CostModelParams& p) {
    return p.ace_header_bytes + n_txs * (p.ace_payload_bytes + p.ace_attestation_bytes);
}

std::uint64_t block_bytes_solana(std::uint64_t n_txs, const CostModelParams& p) {
    return n_txs * p.solana_tx_bytes;
}

std::uint64_t round_to_thousand(std::uint64_t v) {
    return ((v + 500) / 1000) * 1000;
}

namespace {
constexpr std::uint64_t kTable5Sizes[] = {1000, 10000, 100000, 1000000};
constexpr std::uint64_t kTable6Sizes[] = {1000, 10000};
}  // namespace

std::string table5_csv(const CostModelParams& p) {
    std::string out = "n_txs,solana_gpu_ms,solana_cpu_ms,ace_ms,speedup_gpu_vs_ace\n";
    for (std::uint64_t n : kTable5Sizes) {
        double gpu = verify_time_ms(System::SolanaGpu, n, p);
        double cpu = verify_time_ms(System::SolanaCpu, n, p);
        double ours = verify_time_ms(System::Ace, n, p);
        long long speedup = std::llround(gpu / ours);
        out += std::to_string(n) + "," + fmt_num(gpu) + "," + fmt_num(cpu) + "," + fmt_num(ours) +
               "," + std::to_string(speedup) + "\n";
    }
    return out;
}

std::string table5_text(const CostModelParams& p) {
    char buf[128];
    std::string out;
    out += "block verification time, model\n";
    std::snprintf(buf, sizeof(buf), "%12s %14s %14s %10s %10s\n", "block_size", "solana_gpu_ms",
                  "solana_cpu_ms", "ace_ms", "speedup");
    out += buf;
    for (std::uint64_t n : kTable5Sizes) {
        double gpu = verify_time_ms(System::SolanaGpu, n, p);
        double cpu = verify_time_ms(System::SolanaCpu, n, p);
        double ours = verify_time_ms(System::Ace, n, p);
        std::snprintf(buf, sizeof(buf), "%12llu %14s %14s %10s %9lldx\n",
                      static_cast<unsigned long long>(n), fmt_num(gpu).c_str(),
                      fmt_num(cpu).c_str(), fmt_num(ours).c_str(), std::llround(gpu / ours));
        out += buf;
    }
    return out;
}

std::string table6_csv(const CostModelParams& p) {
    std::string out = "n_txs,ed25519_kb,mldsa_kb,zkace_kb,zkace_vs_mldsa\n";
    for (std::uint64_t n : kTable6Sizes) {
        double ed = static_cast<double>(auth_data_per_block_bytes(AuthScheme::Ed25519, n, p)) / 1000.0;
        double ml = static_cast<double>(auth_data_per_block_bytes(AuthScheme::MlDsa, n, p)) / 1000.0;
        double zk = static_cast<double>(auth_data_per_block_bytes(AuthScheme::ZkAce, n, p)) / 1000.0;
        long long ratio = std::llround(ml / zk);
        out += std::to_string(n) + "," + fmt_num(ed) + "," + fmt_num(ml) + "," + fmt_num(zk) +
               "," + std::to_string(ratio) + "\n";
    }
    return out;
}

std::string table6_text(const CostModelParams& p) {
    char buf[128];
    std::string out;
    out += "per-block authorization data, model\n";
    std::snprintf(buf, sizeof(buf), "%8s %12s %12s %10s %16s\n", "n_txs", "ed25519_kb",
                  "mldsa_kb", "zkace_kb", "zkace_vs_mldsa");
    out += buf;
    for (std::uint64_t n : kTable6Sizes) {
        double ed = static_cast<double>(auth_data_per_block_bytes(AuthScheme::Ed25519, n, p)) / 1000.0;
        double ml = static_cast<double>(auth_data_per_block_bytes(AuthScheme::MlDsa, n, p)) / 1000.0;
        double zk = static_cast<double>(auth_data_per_block_bytes(AuthScheme::ZkAce, n, p)) / 1000.0;
        std::snprintf(buf, sizeof(buf), "%8llu %12s %12s %10s %15lldx\n",
                      static_cast<unsigned long long>(n), fmt_num(ed).c_str(),
                      fmt_num(ml).c_str(), fmt_num(zk).c_str(), std::llround(ml / zk));
        out += buf;
    }
    return out;
}

std::string table7_csv() {
    return "chain,block_ms,soft_ms,hard_ms,rollback_condition\n"
           "solana,400,400,12000,fork\n"
           "ethereum,12000,12000,900000,fork\n"
           "ace_runtime,400,400,600,invalid_or_missing_fc_or_fork\n";
}

std::string table7_text() {
    return "finality latency comparison (reference figures)\n"
           "       chain   block_ms    soft_ms    hard_ms  rollback_condition\n"
           "      solana        400        400      12000  fork\n"
           "    ethereum      12000      12000     900000  fork\n"
           " ace_runtime        400        400        600  invalid_or_missing_fc_or_fork\n";
}

std::string table8_csv() {
    return "component,solana_validator,ace_validator_non_builder,ace_builder\n"
           "cpu_usd,2000,1500,2000\n"
           "ram_usd,3000,1500-3000,3000\n"
           "gpu_usd,2000,0,2000\n"
           "total_usd,7500,3500-5000,7500\n"
           "monthly_ops_usd,1000-3000,600-2000,1000-3000\n";
}

std::string table8_text() {
    return "hardware requirements by role (reference figures, USD)\n"
           "        component  solana_validator  ace_validator  ace_builder\n"
           "          cpu_usd              2000           1500         2000\n"
           "          ram_usd              3000      1500-3000         3000\n"
           "          gpu_usd              2000              0         2000\n"
           "        total_usd              7500      3500-5000         7500\n"
           "  monthly_ops_usd         1000-3000       600-2000    1000-3000\n";
}

std::string tps_csv(const CostModelParams& p) {
    std::string out = "system,per_tx_bytes,tps,tps_rounded,vs_solana_bytes\n";
    auto row = [&](const char* name, std::uint64_t bytes, std::uint64_t tps) {
        double ratio = static_cast<double>(p.solana_tx_bytes) / static_cast<double>(bytes);
        out += std::string(name) + "," + std::to_string(bytes) + "," + std::to_string(tps) + "," +
               std::to_string(round_to_thousand(tps)) + "," + fmt_fixed(ratio, 1) + "\n";
    };
    row("solana", p.solana_tx_bytes, bandwidth_tps(System::SolanaCpu, p));
    row("ace", p.ace_tx_bytes, bandwidth_tps(System::Ace, p));
    row("ace_combined", p.ace_tx_bytes + p.witness_bundle_bytes, bandwidth_tps_ace_combined(p));
    return out;
}

std::string tps_text(const CostModelParams& p) {
    char buf[128];
    std::string out = "bandwidth-limited throughput at 1 Gbps\n";
    std::snprintf(buf, sizeof(buf), "%14s %14s %10s %12s %16s\n", "system", "per_tx_bytes",
                  "tps", "tps_rounded", "vs_solana_bytes");
    out += buf;
    auto row = [&](const char* name, std::uint64_t bytes, std::uint64_t tps) {
        double ratio = static_cast<double>(p.solana_tx_bytes) / static_cast<double>(bytes);
        std::snprintf(buf, sizeof(buf), "%14s %14llu %10llu %12llu %15sx\n", name,
                      static_cast<unsigned long long>(bytes),
                      static_cast<unsigned long long>(tps),
                      static_cast<unsigned long long>(round_to_thousand(tps)),
                      fmt_fixed(ratio, 1).c_str());
        out += buf;
    };
    row("solana", p.solana_tx_bytes, bandwidth_tps(System::SolanaCpu, p));
    row("ace", p.ace_tx_bytes, bandwidth_tps(System::Ace, p));
    row("ace_combined", p.ace_tx_bytes + p.witness_bundle_bytes, bandwidth_tps_ace_combined(p));
    return out;
}

bool write_tables(const std::string& dir, const CostModelParams& p) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) return false;
        out << content;
        return out.good();
    };
    return write("table5.csv", table5_csv(p)) && write("table5.txt", table5_text(p)) &&
           write("table6.csv", table6_csv(p)) && write("table6.txt", table6_text(p)) &&
           write("table7.csv", table7_csv()) && write("table7.txt", table7_text()) &&
           write("table8.csv", table8_csv()) && write("table8.txt", table8_text()) &&
           write("tps.csv", tps_csv(p)) && write("tps.txt", tps_text(p));
}

}  // namespace ace::models
