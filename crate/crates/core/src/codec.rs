//! Text encodings used on the wire: uppercase hex and padded standard Base64.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("bad hex: {0}")]
    BadHex(String),
    #[error("bad base64: {0}")]
    BadBase64(String),
}

pub fn hex_encode(data: &[u8]) -> String {
    hex::encode_upper(data)
}

/// Accepts upper- and lowercase digits.
pub fn hex_decode(text: &[u8]) -> Result<Vec<u8>, CodecError> {
    hex::decode(text).map_err(|e| CodecError::BadHex(e.to_string()))
}

pub fn base64_encode(data: &[u8]) -> String {
    STANDARD.encode(data)
}

/// Strict decode: length must be a multiple of 4, padding canonical, no
/// stray trailing bits.
pub fn base64_decode(text: &[u8]) -> Result<Vec<u8>, CodecError> {
    if !text.len().is_multiple_of(4) {
        return Err(CodecError::BadBase64(format!(
            "length {} is not a multiple of 4",
            text.len()
        )));
    }
    STANDARD
        .decode(text)
        .map_err(|e| CodecError::BadBase64(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hex_examples() {
        assert_eq!(hex_encode(&[0x3d, 0x3c]), "3D3C");
        assert_eq!(hex_decode(b"3d3C").unwrap(), vec![0x3d, 0x3c]);
        assert!(matches!(hex_decode(b"B54D78oA"), Err(CodecError::BadHex(_))));
        assert!(matches!(hex_decode(b"ABC"), Err(CodecError::BadHex(_))));
    }

    #[test]
    fn base64_examples() {
        let key = base64_decode(b"8jYYWskp3XCGL5BV1BXBTr//Ammxd9+JbcRx0D8xMvc=").unwrap();
        assert_eq!(key.len(), 32);
        let zeros = base64_encode(&[0u8; 32]);
        assert_eq!(zeros.len(), 44);
        assert_eq!(zeros, format!("{}=", "A".repeat(43)));
        assert!(matches!(base64_decode(b"AB"), Err(CodecError::BadBase64(_))));
        // 'B' leaves a nonzero bit after the last full byte.
        assert!(base64_decode(b"AAB=").is_err());
        assert!(base64_decode(b"AA*=").is_err());
        assert!(base64_decode(b"AA==").is_ok());
    }

    proptest! {
        #[test]
        fn codecs_roundtrip(data in proptest::collection::vec(any::<u8>(), 0..200)) {
            let h = hex_encode(&data);
            prop_assert_eq!(hex_decode(h.as_bytes()).unwrap(), data.clone());
            prop_assert_eq!(hex_decode(h.to_lowercase().as_bytes()).unwrap(), data.clone());
            prop_assert_eq!(base64_decode(base64_encode(&data).as_bytes()).unwrap(), data);
        }
    }
}
