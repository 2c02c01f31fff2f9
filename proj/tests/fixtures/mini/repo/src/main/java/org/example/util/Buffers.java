package org.example.util;

public final class Buffers {

    private Buffers() {
    }

    public static int sum(int[] values, int size) {
        int total = 0;
        for (int i = 0; i <= size; i++) {
            total += values[i];
        }
        return total;
    }

    public static int[] copyOf(int[] values, int size) {
        int[] out = new int[size];
        for (int i = 0; i < size; i++) {
            out[i] = values[i];
        }
        return out;
    }

    public static int max(int[] values, int size) {
        int best = Integer.MIN_VALUE;
        for (int i = 0; i < size; i++) {
            best = Math.max(best, values[i]);
        }
        return best;
    }
}
