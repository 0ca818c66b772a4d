//! Quadrotor flight dynamics on SE(3), a geometric tracking controller with
//! neural-network disturbance estimation, a rotor-aerodynamics wind plant,
//! and a numeric audit of the Lyapunov gain conditions.
//!
//! Frames: inertial `e3` points down, so gravity is `+m g e3` and thrust acts
//! along `-R e3`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod aero;
pub mod allocation;
pub mod audit;
pub mod cli;
pub mod config;
pub mod controller;
pub mod error;
pub mod rigid_body;
pub mod se3;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result};
