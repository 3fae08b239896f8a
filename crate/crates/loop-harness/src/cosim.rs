use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use gpdyn::DynModel;
use mpc_control::{control_step, MpcConfig, SolverConfig};

use crate::HarnessError;

pub const COSIM_PROTOCOL_VERSION: &str = "v1";

/// One line of the newline-delimited JSON co-simulation protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CosimMessage {
    Hello {
        protocol_version: String,
        config_hash: String,
    },
    Observe {
        step: u64,
        melt_area_mm2: f64,
        lookahead_t_k: f64,
    },
    Control {
        step: u64,
        power_w: f64,
        speed_mm_s: f64,
    },
    Error {
        code: String,
        message: String,
    },
    Bye,
}

/// Hash of the controller configuration a session must agree on.
pub fn config_hash(mpc: &MpcConfig, initial_power_w: f64, fixed_speed_mm_s: f64) -> String {
    let canonical = serde_json::json!({
        "mpc": mpc,
        "initial_power_w": initial_power_w,
        "fixed_speed_mm_s": fixed_speed_mm_s,
        "protocol": COSIM_PROTOCOL_VERSION,
    });
    let mut hasher = Sha256::new();
    hasher.update(canonical.to_string().as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub steps_served: u64,
    pub errors: u64,
    pub accepted: bool,
}

/// Serve one strictly sequential co-simulation session over a byte stream.
///
/// Protocol: the client opens with `hello` carrying the protocol version and
/// config hash; the server acknowledges with its own `hello` or refuses with
/// an error (`version-mismatch` / `config-mismatch`). Each `observe(k, x, T)`
/// is answered by `control(k, p, v)` echoing the step index. Malformed lines
/// and out-of-order steps produce `error` replies and the session continues;
/// `bye` (or end of stream) closes it.
pub fn cosim_serve<R: BufRead, W: Write>(
    reader: R,
    mut writer: W,
    model: &DynModel,
    mpc: &MpcConfig,
    solver: &SolverConfig,
    initial_power_w: f64,
    fixed_speed_mm_s: f64,
) -> Result<SessionSummary, HarnessError> {
    let expected_hash = config_hash(mpc, initial_power_w, fixed_speed_mm_s);
    let mut summary = SessionSummary {
        steps_served: 0,
        errors: 0,
        accepted: false,
    };
    let mut last_step: Option<u64> = None;
    let mut u_prev = (initial_power_w, fixed_speed_mm_s);
    let mut t_prev: Option<f64> = None;

    let send = |writer: &mut W, msg: &CosimMessage| -> Result<(), HarnessError> {
        let line = serde_json::to_string(msg)?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        Ok(())
    };

    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let msg: CosimMessage = match serde_json::from_str(&line) {
            Ok(m) => m,
            Err(e) => {
                summary.errors += 1;
                send(
                    &mut writer,
                    &CosimMessage::Error {
                        code: "parse".into(),
                        message: e.to_string(),
                    },
                )?;
                continue;
            }
        };
        match msg {
            CosimMessage::Hello {
                protocol_version,
                config_hash: client_hash,
            } => {
                if protocol_version != COSIM_PROTOCOL_VERSION {
                    summary.errors += 1;
                    send(
                        &mut writer,
                        &CosimMessage::Error {
                            code: "version-mismatch".into(),
                            message: format!(
                                "server speaks {COSIM_PROTOCOL_VERSION}, client sent {protocol_version}"
                            ),
                        },
                    )?;
                } else if client_hash != expected_hash {
                    summary.errors += 1;
                    send(
                        &mut writer,
                        &CosimMessage::Error {
                            code: "config-mismatch".into(),
                            message: "client and server controller configurations differ".into(),
                        },
                    )?;
                } else {
                    summary.accepted = true;
                    send(
                        &mut writer,
                        &CosimMessage::Hello {
                            protocol_version: COSIM_PROTOCOL_VERSION.into(),
                            config_hash: expected_hash.clone(),
                        },
                    )?;
                }
            }
            CosimMessage::Observe {
                step,
                melt_area_mm2,
                lookahead_t_k,
            } => {
                if !summary.accepted {
                    summary.errors += 1;
                    send(
                        &mut writer,
                        &CosimMessage::Error {
                            code: "refused".into(),
                            message: "session not accepted; send a valid hello first".into(),
                        },
                    )?;
                    continue;
                }
                if let Some(prev) = last_step {
                    if step <= prev {
                        summary.errors += 1;
                        send(
                            &mut writer,
                            &CosimMessage::Error {
                                code: "order".into(),
                                message: format!("step {step} not after {prev}"),
                            },
                        )?;
                        continue;
                    }
                }
                let out = match control_step(
                    model,
                    melt_area_mm2,
                    lookahead_t_k,
                    t_prev.unwrap_or(lookahead_t_k),
                    u_prev,
                    mpc,
                    solver,
                ) {
                    Ok(o) => o,
                    Err(e) => {
                        summary.errors += 1;
                        send(
                            &mut writer,
                            &CosimMessage::Error {
                                code: "control".into(),
                                message: e.to_string(),
                            },
                        )?;
                        continue;
                    }
                };
                t_prev = Some(lookahead_t_k);
                u_prev = (out.power_w, out.speed_mm_s);
                last_step = Some(step);
                summary.steps_served += 1;
                send(
                    &mut writer,
                    &CosimMessage::Control {
                        step,
                        power_w: out.power_w,
                        speed_mm_s: out.speed_mm_s,
                    },
                )?;
            }
            CosimMessage::Bye => break,
            CosimMessage::Control { .. } | CosimMessage::Error { .. } => {
                summary.errors += 1;
                send(
                    &mut writer,
                    &CosimMessage::Error {
                        code: "unexpected".into(),
                        message: "server-to-client message kind received".into(),
                    },
                )?;
            }
        }
    }
    Ok(summary)
}
