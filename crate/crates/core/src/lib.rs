//! Simulator for quantum secure conditional direct communication over shared
//! Bell pairs: Charlie prepares the pairs, Alice and Bob communicate only
//! once he reveals which Bell state each pair started in.

pub mod adversary;
pub mod channel_security;
pub mod harness;
pub mod protocol;
pub mod statevec;
