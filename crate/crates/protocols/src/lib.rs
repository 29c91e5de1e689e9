//! Secret-sharing protocols run over the five-qubit graph-state resource:
//! classical secrets (CQ), quantum secrets (QQ), the one-time-pad hybrid
//! threshold scheme, and the verified variant (SQQ), plus the session
//! harness that turns each into a message transcript.

pub mod cq;
pub mod error;
pub mod field;
pub mod hybrid;
pub mod qq;
pub mod roles;
pub mod session;
pub mod sim;
pub mod sqq;

pub use error::{ProtocolError, Result};
pub use roles::{pair_class, PairClass, Party, PlayerSet, SecretQubit, Triplet};
