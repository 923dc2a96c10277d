//! Named information terms shared by the evaluators and the builtin
//! inequality systems. Suffix `1`/`2` is the relay index; the `V` variants
//! belong to the combined decode/compress-and-forward scheme.

/// Relay-1 compression vs. its own observation: `I(Ŷ1;Y1|X1)`.
pub const A1: &str = "I(Yh1;Y1|X1)";
pub const A2: &str = "I(Yh2;Y2|X2)";
/// Extra compression cost seen by the sender: `I(Ŷ1;Y2,X2|X1,Y1)`.
pub const B1: &str = "I(Yh1;Y2,X2|X1,Y1)";
pub const B2: &str = "I(Yh2;Y1,X1|X2,Y2)";
/// Sender-side covering, relay 1: `I(Ŷ1;Y1,Y2,X2|X1)`.
pub const C1: &str = "I(Yh1;Y1,Y2,X2|X1)";
pub const C2: &str = "I(Yh2;Y1,Y2,X1|X2)";
/// Second stage of the joint covering: `I(Ŷ2;Ŷ1,Y1,Y2,X1|X2)`.
pub const D2: &str = "I(Yh2;Yh1,Y1,Y2,X1|X2)";
/// Bin-index decoding at the receiver.
pub const E1: &str = "I(X1;Y0,X2)";
pub const E2: &str = "I(X2;Y0,X1)";
pub const E12: &str = "I(X1,X2;Y0)";
/// Side information the receiver has about each compression.
pub const F1: &str = "I(Yh1;Y0|X1)";
pub const F2: &str = "I(Yh2;Y0|X2)";
/// Message term of the objective.
pub const G: &str = "I(X0;Y0,Yh1,Yh2|X1,X2)";
/// Relay-input dependence term (zero under the product input law).
pub const Z: &str = "I(X1;X2)";

/// Relay decoding of the decode-and-forward part: `I(V1;Y1|X1)`.
pub const C1V: &str = "I(V1;Y1|X1)";
pub const C2V: &str = "I(V2;Y2|X2)";
pub const A1V: &str = "I(Yh1;Y1|X1,V1)";
pub const A2V: &str = "I(Yh2;Y2|X2,V2)";
/// Receiver's direct view of the decode-and-forward codeword.
pub const AV1: &str = "I(V1;Y0|X1)";
pub const AV2: &str = "I(V2;Y0|X2)";
pub const F1V: &str = "I(Yh1;Y0|X1,V1)";
pub const F2V: &str = "I(Yh2;Y0|X2,V2)";
pub const G2: &str = "I(X0;Y0,Yh1,Yh2|X1,X2,V1,V2)";
pub const Z2: &str = "I(X1,V1;X2,V2)";
pub const K1: &str = "I(Yh1;Y1,Y2,X2,V2|X1,V1)";
pub const K2: &str = "I(Yh2;Y1,Y2,X1,V1|X2,V2)";
pub const D2V: &str = "I(Yh2;Yh1,Y1,Y2,X1,V1|X2,V2)";
