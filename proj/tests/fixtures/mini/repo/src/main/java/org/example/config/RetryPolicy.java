package org.example.config;

public class RetryPolicy {

    private final int maxRetries;
    private final long backoffMillis;

    public RetryPolicy(int maxRetries, long backoffMillis) {
        this.maxRetries = maxRetries;
        this.backoffMillis = backoffMillis;
    }

    public long delayFor(int attempt) {
        if (attempt > maxRetries) {
            return -1;
        }
        long delay = backoffMillis * attempt;
        return delay;
    }
}
