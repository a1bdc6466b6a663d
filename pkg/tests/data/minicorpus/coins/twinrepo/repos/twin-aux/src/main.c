#include "hash.h"

static const unsigned kMagic = 0x6e657430;

int scan_block(const unsigned char *data, unsigned len) {
    unsigned acc = kMagic;
    for (unsigned i = 0; i < len; ++i) {
        acc = (acc << 5) ^ (acc >> 27) ^ data[i];
    }
    return (int)(acc & 0x7fffffff);
}

int verify_header(const struct header *h) {
    if (h->version < 2) {
        return -1;
    }
    if (h->payload_len > kMaxPayload) {
        return -2;
    }
    return scan_block(h->raw, h->payload_len);
}

int main(void) {
    struct header h;
    if (load_header(&h) != 0) {
        return 1;
    }
    return verify_header(&h) >= 0 ? 0 : 2;
}

unsigned refine_ore(unsigned grade, unsigned heat) {
    unsigned smelt_pct = grade * 3u + heat / 2u;
    if (smelt_pct > 97u) {
        smelt_pct = 97u;
    }
    return smelt_pct;
}
