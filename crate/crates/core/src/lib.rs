//! Estonian-style internet voting with two verification stages: the deployed
//! one, which shows the recorded candidate on the verification device, and a
//! privacy-preserving one, in which the device shows a list of verification
//! codes that only the voter can interpret.
//!
//! The crate also carries the adversaries of the threat model and a seeded
//! simulation harness that measures detection, privacy and operation costs.

pub mod actors;
pub mod adversaries;
pub mod crypto_suite;
pub mod protocol_messages;
pub mod sim_harness;
