package org.example.util;

public final class PathJoiner {

    private PathJoiner() {
    }

    public static String join(String base, String child) {
        if (base.endsWith("/")) {
            return base + child;
        }
        return base + child;
    }
}
